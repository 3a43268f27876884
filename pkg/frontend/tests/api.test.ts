import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function stubClient(
  handler: (input: string, init?: RequestInit) => Response,
): { client: ApiClient; calls: Array<{ input: string; init?: RequestInit }> } {
  const calls: Array<{ input: string; init?: RequestInit }> = [];
  const client = new ApiClient("http://svc", async (input, init) => {
    calls.push({ input, init });
    return handler(input, init);
  });
  return { client, calls };
}

describe("ApiClient", () => {
  it("lists pending alarms with the status filter", async () => {
    const alarm = {
      id: 1,
      raw_query: "q",
      normalized_query: "q",
      score: "63.636364",
      best_pattern_id: 1,
      status: "pending",
      raised_at: "2024-01-01T00:00:00Z",
    };
    const { client, calls } = stubClient(() => jsonResponse(200, { alarms: [alarm] }));
    const alarms = await client.listAlarms("pending");
    expect(calls[0]?.input).toBe("http://svc/v1/alarms?status=pending");
    expect(alarms).toHaveLength(1);
    expect(alarms[0]?.score).toBe("63.636364");
  });

  it("posts decisions with the pattern text", async () => {
    const { client, calls } = stubClient(() =>
      jsonResponse(200, { id: 2, status: "confirmed", new_pattern_id: 9 }),
    );
    const decided = await client.decide(2, "confirm", "' or '1");
    expect(decided.new_pattern_id).toBe(9);
    expect(calls[0]?.input).toBe("http://svc/v1/alarms/2/decision");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      action: "confirm",
      pattern_text: "' or '1",
    });
  });

  it("omits pattern_text when dismissing", async () => {
    const { client, calls } = stubClient(() =>
      jsonResponse(200, { id: 2, status: "dismissed" }),
    );
    await client.decide(2, "dismiss");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({ action: "dismiss" });
  });

  it("raises ApiError with status and server detail", async () => {
    const { client } = stubClient(() =>
      jsonResponse(409, { error: "alarm 2 is already dismissed" }),
    );
    const failure = await client.decide(2, "dismiss").catch((e) => e);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(409);
    expect(failure.detail).toContain("already dismissed");
  });

  it("checks queries", async () => {
    const { client, calls } = stubClient(() =>
      jsonResponse(200, { verdict: "rejected", score: "100.000000", pattern_id: 3 }),
    );
    const response = await client.check("x' or '1'='1");
    expect(response.verdict).toBe("rejected");
    expect(calls[0]?.input).toBe("http://svc/v1/check");
  });

  it("lists patterns", async () => {
    const { client } = stubClient(() =>
      jsonResponse(200, {
        patterns: [
          { id: 1, text: "union select", source: "seed", created_at: "2024-01-01T00:00:00Z" },
        ],
      }),
    );
    const patterns = await client.listPatterns();
    expect(patterns[0]?.source).toBe("seed");
  });
});
