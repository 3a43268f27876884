import { ApiClient } from "./api.js";
import { ConsoleApp } from "./app.js";
import { resolveApiBase } from "./config.js";

const base = resolveApiBase();
const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}
const header = document.getElementById("api-base");
if (header) {
  header.textContent = base;
}
const app = new ConsoleApp({ api: new ApiClient(base), root });
app.start();
