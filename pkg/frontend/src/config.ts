const DEFAULT_BASE = "http://127.0.0.1:8000";

/**
 * Resolve the detection-service base URL. Priority: a global set before the
 * bundle loads, an `?api=` query parameter (persisted for next visit), a
 * previously persisted value, then the default local service address.
 */
export function resolveApiBase(win: Window = window): string {
  const injected = (win as unknown as Record<string, unknown>)["SQLGUARD_API_BASE"];
  if (typeof injected === "string" && injected) {
    return injected.replace(/\/$/, "");
  }
  const fromQuery = new URL(win.location.href).searchParams.get("api");
  if (fromQuery) {
    try {
      win.localStorage.setItem("sqlguard_api_base", fromQuery);
    } catch {
      // storage may be unavailable; the query param still wins this session
    }
    return fromQuery.replace(/\/$/, "");
  }
  try {
    const stored = win.localStorage.getItem("sqlguard_api_base");
    if (stored) return stored.replace(/\/$/, "");
  } catch {
    // fall through to default
  }
  return DEFAULT_BASE;
}
