import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { createServer } from "node:net";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ConsoleApp } from "../src/app.js";

const PARTIAL_QUERY = "select * from login where user='u' or '1x'='y'";
const TAUTOLOGY = "' or '1'='1";

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const server = createServer();
    server.listen(0, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        const port = address.port;
        server.close(() => resolve(port));
      } else {
        server.close(() => reject(new Error("no port")));
      }
    });
  });
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function byTestId(root: HTMLElement, id: string): HTMLElement | null {
  return root.querySelector(`[data-testid="${id}"]`);
}

describe("console against the live detection service", () => {
  let proc: ChildProcess;
  let base: string;
  let workdir: string;
  let api: ApiClient;

  beforeAll(async () => {
    workdir = mkdtempSync(join(tmpdir(), "sqlguard-console-"));
    const port = await freePort();
    base = `http://127.0.0.1:${port}`;
    proc = spawn(
      "python3",
      [
        "-m", "sqlguard", "serve",
        "--listen", `127.0.0.1:${port}`,
        "--patterns", join(workdir, "patterns.spl"),
        "--alarms", join(workdir, "alarms.jsonl"),
      ],
      { stdio: "ignore" },
    );
    api = new ApiClient(base);
    const deadline = Date.now() + 20000;
    for (;;) {
      try {
        await api.health();
        break;
      } catch {
        if (Date.now() > deadline) throw new Error("service never became healthy");
        await new Promise((resolve) => setTimeout(resolve, 200));
      }
    }
  });

  afterAll(() => {
    proc?.kill("SIGINT");
    rmSync(workdir, { recursive: true, force: true });
  });

  it("runs the full confirm round trip", async () => {
    // seed the pattern list and trip an alarm through the real detector
    await fetch(`${base}/v1/patterns`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ text: TAUTOLOGY }),
    });
    const checked = await api.check(PARTIAL_QUERY);
    expect(checked.verdict).toBe("alarm");
    expect(checked.score).toBe("63.636364");

    const root = document.createElement("div");
    document.body.appendChild(root);
    const app = new ConsoleApp({ api, root });
    await app.refresh();

    // pending alarm renders with the verbatim score string and highlight
    const alarmId = checked.alarm_id!;
    expect(byTestId(root, `score-${alarmId}`)?.textContent).toBe("63.636364");
    expect(root.querySelector(".hl")?.textContent).toBe("' or '1");
    const input = byTestId(root, `pattern-input-${alarmId}`) as HTMLTextAreaElement;
    expect(input.value).toBe(PARTIAL_QUERY); // suggested: full normalized query

    // edit the suggestion down to the injected fragment and confirm
    input.value = "' or '1x'='y";
    input.dispatchEvent(new Event("input"));
    (byTestId(root, `confirm-${alarmId}`) as HTMLButtonElement).click();
    await new Promise((resolve) => setTimeout(resolve, 300));

    // the pattern appears in the patterns view as an admin row
    const patterns = await api.listPatterns();
    const minted = patterns.find((p) => p.text === "' or '1x'='y");
    expect(minted?.source).toBe("admin");
    expect(byTestId(root, `pattern-row-${minted!.id}`)).not.toBeNull();
    expect(byTestId(root, `alarm-row-${alarmId}`)).toBeNull();

    // the console re-check action reports rejected for the identical query
    (byTestId(root, `recheck-${alarmId}`) as HTMLButtonElement).click();
    await new Promise((resolve) => setTimeout(resolve, 300));
    expect(byTestId(root, `recheck-verdict-${alarmId}`)?.textContent).toBe("rejected");

    // and the pending view is empty again
    await app.refresh();
    await flush();
    expect(byTestId(root, "pending-empty")).not.toBeNull();
  }, 60000);
});
