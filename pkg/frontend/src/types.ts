export type AlarmStatus = "pending" | "confirmed" | "dismissed";

export interface AlarmView {
  id: number;
  raw_query: string;
  normalized_query: string;
  /** Verbatim decimal string from the API; rendered without re-rounding. */
  score: string;
  best_pattern_id: number;
  status: AlarmStatus;
  new_pattern_id?: number;
  raised_at: string;
  decided_at?: string;
  /** Text of the best-scoring pattern, joined in by the service. */
  pattern_text?: string;
  /** Byte offset just past the deepest prefix hit in normalized_query. */
  match_end?: number | null;
  /** Byte length of that prefix hit. */
  match_len?: number | null;
}

export interface Pattern {
  id: number;
  text: string;
  source: "seed" | "admin";
  created_at: string;
}

export interface CheckResponse {
  verdict: "accepted" | "alarm" | "rejected";
  score: string;
  pattern_id?: number;
  match_end?: number;
  alarm_id?: number;
}

export interface Health {
  status: string;
  patterns: number;
  pending_alarms: number;
}
