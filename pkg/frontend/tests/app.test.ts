import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ConsoleApp } from "../src/app.js";
import { fakeService } from "./fake_service.js";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

function mount(service: ReturnType<typeof fakeService>) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const app = new ConsoleApp({
    api: new ApiClient("http://svc", service.fetchFn),
    root,
  });
  return { app, root };
}

function byTestId(root: HTMLElement, id: string): HTMLElement | null {
  return root.querySelector(`[data-testid="${id}"]`);
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("pending view", () => {
  it("shows the empty state when there are no alarms", async () => {
    const service = fakeService();
    const { app, root } = mount(service);
    await app.refresh();
    expect(byTestId(root, "pending-empty")?.textContent).toBe("no pending alarms");
  });

  it("renders score strings verbatim and highlights the matched prefix", async () => {
    const service = fakeService();
    service.addPattern("' or '1'='1");
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    expect(byTestId(root, "score-1")?.textContent).toBe("63.636364");
    const highlighted = root.querySelectorAll(".hl");
    expect(highlighted).toHaveLength(1);
    expect(highlighted[0]?.textContent).toBe("' or '1");
    const input = byTestId(root, "pattern-input-1") as HTMLTextAreaElement;
    expect(input.value).toBe("select * from login where user='u' or '1x'='y'");
  });

  it("lists alarms newest-first", async () => {
    const service = fakeService();
    service.addAlarm();
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();
    const rows = [...root.querySelectorAll("tr.alarm")].map((r) =>
      r.getAttribute("data-testid"),
    );
    expect(rows).toEqual(["alarm-row-2", "alarm-row-1"]);
  });

  it("keeps decided alarms out of the pending view", async () => {
    const service = fakeService();
    service.addAlarm({ status: "dismissed" });
    const { app, root } = mount(service);
    await app.refresh();
    expect(byTestId(root, "pending-empty")).not.toBeNull();
  });
});

describe("decisions", () => {
  it("confirm posts the edited fragment, grows the pattern list, removes the row", async () => {
    const service = fakeService();
    service.addPattern("' or '1'='1");
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    const input = byTestId(root, "pattern-input-1") as HTMLTextAreaElement;
    input.value = "' or '1x'='y";
    input.dispatchEvent(new Event("input"));
    (byTestId(root, "confirm-1") as HTMLButtonElement).click();
    await flush();
    await flush();

    expect(service.state.patterns.map((p) => p.text)).toContain("' or '1x'='y");
    expect(byTestId(root, "alarm-row-1")).toBeNull();
    expect(byTestId(root, "notice-1")?.textContent).toContain("pattern #2 added");
    expect(byTestId(root, "pattern-row-2")?.classList.contains("admin")).toBe(true);
  });

  it("dismiss removes the row without touching the pattern list", async () => {
    const service = fakeService();
    service.addPattern("' or '1'='1");
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    (byTestId(root, "dismiss-1") as HTMLButtonElement).click();
    await flush();
    await flush();

    expect(byTestId(root, "alarm-row-1")).toBeNull();
    expect(service.state.patterns).toHaveLength(1);
    expect(byTestId(root, "notice-1")?.textContent).toContain("dismissed");
  });

  it("disables confirm while the pattern text is blank", async () => {
    const service = fakeService();
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    const input = byTestId(root, "pattern-input-1") as HTMLTextAreaElement;
    const confirm = byTestId(root, "confirm-1") as HTMLButtonElement;
    expect(confirm.disabled).toBe(false);
    input.value = "   ";
    input.dispatchEvent(new Event("input"));
    expect(confirm.disabled).toBe(true);
    confirm.click();
    await flush();
    expect(service.state.alarms[0]?.status).toBe("pending");
  });

  it("keeps the draft across refreshes", async () => {
    const service = fakeService();
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();
    const input = byTestId(root, "pattern-input-1") as HTMLTextAreaElement;
    input.value = "edited";
    input.dispatchEvent(new Event("input"));
    await app.refresh();
    const after = byTestId(root, "pattern-input-1") as HTMLTextAreaElement;
    expect(after.value).toBe("edited");
  });

  it("surfaces a 409 and refreshes the row to its decided state", async () => {
    const service = fakeService();
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    // another console decides first
    service.state.alarms[0]!.status = "dismissed";
    (byTestId(root, "dismiss-1") as HTMLButtonElement).click();
    await flush();
    await flush();

    expect(byTestId(root, "alarm-row-1")).toBeNull(); // refreshed away
    expect(byTestId(root, "pending-empty")).not.toBeNull();
  });

  it("shows inline errors for failed decisions on a still-pending row", async () => {
    const service = fakeService();
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    const original = service.fetchFn;
    let fail = true;
    const failingOnce: typeof service.fetchFn = async (input, init) => {
      if (fail && String(init?.method) === "POST") {
        fail = false;
        return new Response(JSON.stringify({ error: "nope" }), { status: 400 });
      }
      return original(input, init);
    };
    const app2root = document.createElement("div");
    document.body.appendChild(app2root);
    const app2 = new ConsoleApp({
      api: new ApiClient("http://svc", failingOnce),
      root: app2root,
    });
    await app2.refresh();
    (byTestId(app2root, "confirm-1") as HTMLButtonElement).click();
    await flush();
    await flush();
    expect(byTestId(app2root, "row-error-1")?.textContent).toContain("400");
    expect(byTestId(app2root, "alarm-row-1")).not.toBeNull();
  });
});

describe("re-check", () => {
  it("reports the live verdict for the identical query after confirming", async () => {
    const service = fakeService();
    service.addPattern("' or '1'='1");
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();

    const input = byTestId(root, "pattern-input-1") as HTMLTextAreaElement;
    input.value = "' or '1x'='y";
    input.dispatchEvent(new Event("input"));
    (byTestId(root, "confirm-1") as HTMLButtonElement).click();
    await flush();
    await flush();

    (byTestId(root, "recheck-1") as HTMLButtonElement).click();
    await flush();
    expect(byTestId(root, "recheck-verdict-1")?.textContent).toBe("rejected");
  });
});

describe("connection failures", () => {
  it("shows a banner with retry and recovers", async () => {
    const service = fakeService();
    service.addAlarm();
    service.state.failing = true;
    const { app, root } = mount(service);
    await app.refresh();
    expect(byTestId(root, "error-banner")?.textContent).toContain("data may be stale");

    service.state.failing = false;
    (root.querySelector("button.retry") as HTMLButtonElement).click();
    await flush();
    await flush();
    expect(byTestId(root, "error-banner")).toBeNull();
    expect(byTestId(root, "alarm-row-1")).not.toBeNull();
  });

  it("marks stale data instead of silently keeping it", async () => {
    const service = fakeService();
    service.addAlarm();
    const { app, root } = mount(service);
    await app.refresh();
    expect(byTestId(root, "alarm-row-1")).not.toBeNull();

    service.state.failing = true;
    await app.refresh();
    expect(byTestId(root, "error-banner")).not.toBeNull();
    expect(byTestId(root, "alarm-row-1")).not.toBeNull(); // stale but flagged
  });
});

describe("patterns view", () => {
  it("lists patterns in id order and distinguishes admin rows", async () => {
    const service = fakeService();
    service.addPattern("' or '1'='1", "seed");
    service.addPattern("union select", "admin");
    const { app, root } = mount(service);
    await app.refresh();
    const rows = [...root.querySelectorAll("section.patterns tr")].slice(1);
    expect(rows.map((r) => r.getAttribute("data-testid"))).toEqual([
      "pattern-row-1",
      "pattern-row-2",
    ]);
    expect(rows[0]?.classList.contains("seed")).toBe(true);
    expect(rows[1]?.classList.contains("admin")).toBe(true);
  });
});
