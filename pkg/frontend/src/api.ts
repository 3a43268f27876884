import type { AlarmStatus, AlarmView, CheckResponse, Health, Pattern } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Thin typed client over the service JSON API; all state lives server-side. */
export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail =
        typeof (body as Record<string, unknown>)["error"] === "string"
          ? ((body as Record<string, unknown>)["error"] as string)
          : response.statusText;
      throw new ApiError(response.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async health(): Promise<Health> {
    return this.request<Health>("/v1/health");
  }

  async listAlarms(status?: AlarmStatus): Promise<AlarmView[]> {
    const query = status ? `?status=${status}` : "";
    const body = await this.request<{ alarms: AlarmView[] }>(`/v1/alarms${query}`);
    return body.alarms;
  }

  async listPatterns(): Promise<Pattern[]> {
    const body = await this.request<{ patterns: Pattern[] }>("/v1/patterns");
    return body.patterns;
  }

  async decide(
    alarmId: number,
    action: "confirm" | "dismiss",
    patternText?: string,
  ): Promise<AlarmView> {
    return this.post<AlarmView>(`/v1/alarms/${alarmId}/decision`, {
      action,
      ...(patternText !== undefined ? { pattern_text: patternText } : {}),
    });
  }

  async check(query: string): Promise<CheckResponse> {
    return this.post<CheckResponse>("/v1/check", { query });
  }
}
