import { ApiClient, ApiError } from "./api.js";
import { highlightSegments } from "./highlight.js";
import type { AlarmView, Pattern } from "./types.js";

export interface AppOptions {
  api: ApiClient;
  root: HTMLElement;
  doc?: Document;
  pollIntervalMs?: number;
}

interface DecisionNotice {
  alarmId: number;
  kind: "confirmed" | "dismissed";
  message: string;
  rawQuery: string;
  recheckVerdict?: string;
}

/**
 * Single-page admin console. All verdicts, scores, and highlight spans come
 * from API responses; the console performs no detection logic of its own and
 * only updates state after the server has confirmed a change.
 */
export class ConsoleApp {
  private readonly api: ApiClient;
  private readonly root: HTMLElement;
  private readonly doc: Document;
  private readonly pollIntervalMs: number;
  private timer: ReturnType<typeof setInterval> | undefined;

  private alarms: AlarmView[] = [];
  private patterns: Pattern[] = [];
  private notices: DecisionNotice[] = [];
  private drafts = new Map<number, string>();
  private rowErrors = new Map<number, string>();
  private connectionError: string | null = null;
  private loaded = false;

  constructor(options: AppOptions) {
    this.api = options.api;
    this.root = options.root;
    this.doc = options.doc ?? document;
    this.pollIntervalMs = options.pollIntervalMs ?? 5000;
  }

  start(): void {
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.pollIntervalMs);
  }

  stop(): void {
    if (this.timer !== undefined) clearInterval(this.timer);
    this.timer = undefined;
  }

  /** Pull pending alarms and the pattern list, then re-render. */
  async refresh(): Promise<void> {
    try {
      const [alarms, patterns] = await Promise.all([
        this.api.listAlarms("pending"),
        this.api.listPatterns(),
      ]);
      this.alarms = alarms.slice().sort((a, b) => b.id - a.id); // newest first
      this.patterns = patterns;
      this.connectionError = null;
      this.loaded = true;
      for (const id of [...this.drafts.keys()]) {
        if (!alarms.some((a) => a.id === id)) this.drafts.delete(id);
      }
    } catch (error) {
      this.connectionError = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  async confirm(alarmId: number): Promise<void> {
    const alarm = this.alarms.find((a) => a.id === alarmId);
    const text = this.draftFor(alarmId);
    if (!alarm || !text.trim()) return;
    try {
      const decided = await this.api.decide(alarmId, "confirm", text);
      this.drafts.delete(alarmId);
      this.rowErrors.delete(alarmId);
      this.notices.unshift({
        alarmId,
        kind: "confirmed",
        message: `alarm #${alarmId} confirmed — pattern #${decided.new_pattern_id} added`,
        rawQuery: alarm.raw_query,
      });
    } catch (error) {
      this.noteRowError(alarmId, error);
    }
    await this.refresh();
  }

  async dismiss(alarmId: number): Promise<void> {
    const alarm = this.alarms.find((a) => a.id === alarmId);
    if (!alarm) return;
    try {
      await this.api.decide(alarmId, "dismiss");
      this.drafts.delete(alarmId);
      this.rowErrors.delete(alarmId);
      this.notices.unshift({
        alarmId,
        kind: "dismissed",
        message: `alarm #${alarmId} dismissed`,
        rawQuery: alarm.raw_query,
      });
    } catch (error) {
      this.noteRowError(alarmId, error);
    }
    await this.refresh();
  }

  /** Re-run the identical query through the live detector. */
  async recheck(notice: DecisionNotice): Promise<void> {
    try {
      const response = await this.api.check(notice.rawQuery);
      notice.recheckVerdict = response.verdict;
    } catch (error) {
      notice.recheckVerdict = error instanceof Error ? error.message : String(error);
    }
    this.render();
  }

  private draftFor(alarmId: number): string {
    const draft = this.drafts.get(alarmId);
    if (draft !== undefined) return draft;
    const alarm = this.alarms.find((a) => a.id === alarmId);
    return alarm ? alarm.normalized_query : "";
  }

  private noteRowError(alarmId: number, error: unknown): void {
    if (error instanceof ApiError) {
      const hint = error.status === 409 ? " (decided elsewhere; row refreshed)" : "";
      this.rowErrors.set(alarmId, `${error.status}: ${error.detail}${hint}`);
    } else {
      this.rowErrors.set(alarmId, error instanceof Error ? error.message : String(error));
    }
  }

  // ---- rendering -------------------------------------------------------

  private element(tag: string, className?: string, text?: string): HTMLElement {
    const node = this.doc.createElement(tag);
    if (className) node.className = className;
    if (text !== undefined) node.textContent = text;
    return node;
  }

  private render(): void {
    this.root.textContent = "";
    if (this.connectionError !== null) {
      this.root.appendChild(this.renderBanner());
    }
    this.root.appendChild(this.renderPending());
    if (this.notices.length > 0) {
      this.root.appendChild(this.renderNotices());
    }
    this.root.appendChild(this.renderPatterns());
  }

  private renderBanner(): HTMLElement {
    const banner = this.element("div", "banner");
    banner.setAttribute("data-testid", "error-banner");
    banner.appendChild(
      this.element("span", undefined, `connection failed (${this.connectionError}) — data may be stale`),
    );
    const retry = this.element("button", "retry", "retry") as HTMLButtonElement;
    retry.addEventListener("click", () => void this.refresh());
    banner.appendChild(retry);
    return banner;
  }

  private renderPending(): HTMLElement {
    const section = this.element("section", "pending");
    section.appendChild(this.element("h2", undefined, "Pending alarms"));
    if (!this.loaded && this.connectionError !== null) {
      return section;
    }
    if (this.alarms.length === 0) {
      const empty = this.element("p", "empty", "no pending alarms");
      empty.setAttribute("data-testid", "pending-empty");
      section.appendChild(empty);
      return section;
    }
    const table = this.element("table");
    const head = this.element("tr");
    for (const title of ["id", "raised", "score", "query", "pattern", "decision"]) {
      head.appendChild(this.element("th", undefined, title));
    }
    table.appendChild(head);
    for (const alarm of this.alarms) {
      table.appendChild(this.renderAlarmRow(alarm));
    }
    section.appendChild(table);
    return section;
  }

  private renderAlarmRow(alarm: AlarmView): HTMLElement {
    const row = this.element("tr", "alarm");
    row.setAttribute("data-testid", `alarm-row-${alarm.id}`);
    row.appendChild(this.element("td", undefined, String(alarm.id)));
    row.appendChild(this.element("td", "when", alarm.raised_at));

    const score = this.element("td", "score", alarm.score); // verbatim API string
    score.setAttribute("data-testid", `score-${alarm.id}`);
    row.appendChild(score);

    const query = this.element("td", "query");
    for (const segment of highlightSegments(
      alarm.normalized_query,
      alarm.match_end,
      alarm.match_len,
    )) {
      const span = this.element("span", segment.highlighted ? "hl" : undefined, segment.text);
      query.appendChild(span);
    }
    row.appendChild(query);

    row.appendChild(
      this.element("td", "best", alarm.pattern_text ?? `#${alarm.best_pattern_id}`),
    );

    const actions = this.element("td", "actions");
    const input = this.doc.createElement("textarea");
    input.value = this.draftFor(alarm.id);
    input.setAttribute("data-testid", `pattern-input-${alarm.id}`);
    const confirm = this.element("button", "confirm", "confirm") as HTMLButtonElement;
    confirm.setAttribute("data-testid", `confirm-${alarm.id}`);
    confirm.disabled = input.value.trim() === "";
    input.addEventListener("input", () => {
      this.drafts.set(alarm.id, input.value);
      confirm.disabled = input.value.trim() === "";
    });
    confirm.addEventListener("click", () => void this.confirm(alarm.id));
    const dismiss = this.element("button", "dismiss", "dismiss") as HTMLButtonElement;
    dismiss.setAttribute("data-testid", `dismiss-${alarm.id}`);
    dismiss.addEventListener("click", () => void this.dismiss(alarm.id));
    actions.appendChild(input);
    actions.appendChild(confirm);
    actions.appendChild(dismiss);
    const rowError = this.rowErrors.get(alarm.id);
    if (rowError) {
      const message = this.element("div", "row-error", rowError);
      message.setAttribute("data-testid", `row-error-${alarm.id}`);
      actions.appendChild(message);
    }
    row.appendChild(actions);
    return row;
  }

  private renderNotices(): HTMLElement {
    const section = this.element("section", "notices");
    section.appendChild(this.element("h2", undefined, "Recent decisions"));
    for (const notice of this.notices) {
      const line = this.element("div", `notice ${notice.kind}`);
      line.setAttribute("data-testid", `notice-${notice.alarmId}`);
      line.appendChild(this.element("span", undefined, notice.message));
      const recheck = this.element("button", "recheck", "re-check") as HTMLButtonElement;
      recheck.setAttribute("data-testid", `recheck-${notice.alarmId}`);
      recheck.addEventListener("click", () => void this.recheck(notice));
      line.appendChild(recheck);
      if (notice.recheckVerdict !== undefined) {
        const verdict = this.element("span", "verdict", notice.recheckVerdict);
        verdict.setAttribute("data-testid", `recheck-verdict-${notice.alarmId}`);
        line.appendChild(verdict);
      }
      section.appendChild(line);
    }
    return section;
  }

  private renderPatterns(): HTMLElement {
    const section = this.element("section", "patterns");
    section.appendChild(
      this.element("h2", undefined, `Pattern list (${this.patterns.length})`),
    );
    const table = this.element("table");
    const head = this.element("tr");
    for (const title of ["id", "text", "source", "created"]) {
      head.appendChild(this.element("th", undefined, title));
    }
    table.appendChild(head);
    for (const pattern of this.patterns) {
      const row = this.element("tr", pattern.source === "admin" ? "admin" : "seed");
      row.setAttribute("data-testid", `pattern-row-${pattern.id}`);
      row.appendChild(this.element("td", undefined, String(pattern.id)));
      row.appendChild(this.element("td", "text", pattern.text));
      row.appendChild(this.element("td", "source", pattern.source));
      row.appendChild(this.element("td", "when", pattern.created_at));
      table.appendChild(row);
    }
    section.appendChild(table);
    return section;
  }
}
