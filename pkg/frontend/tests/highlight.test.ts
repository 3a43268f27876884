import { describe, expect, it } from "vitest";

import { highlightSegments } from "../src/highlight.js";

describe("highlightSegments", () => {
  it("returns one plain segment when there is no span", () => {
    expect(highlightSegments("select 1", null, null)).toEqual([
      { text: "select 1", highlighted: false },
    ]);
  });

  it("returns nothing for empty text", () => {
    expect(highlightSegments("", null, null)).toEqual([]);
  });

  it("splits around a middle span", () => {
    // "' or '1" ends at byte 14 in "user='u' or '1x'"
    const segments = highlightSegments("user='u' or '1x'", 14, 7);
    expect(segments).toEqual([
      { text: "user='u", highlighted: false },
      { text: "' or '1", highlighted: true },
      { text: "x'", highlighted: false },
    ]);
  });

  it("handles a span touching both ends", () => {
    expect(highlightSegments("abc", 3, 3)).toEqual([
      { text: "abc", highlighted: true },
    ]);
  });

  it("maps byte offsets through multi-byte characters", () => {
    // "—" is 3 UTF-8 bytes; span covers "or" after it
    const text = "— or x";
    const segments = highlightSegments(text, 6, 2);
    expect(segments).toEqual([
      { text: "— ", highlighted: false },
      { text: "or", highlighted: true },
      { text: " x", highlighted: false },
    ]);
  });

  it("clamps out-of-range spans to the text", () => {
    const segments = highlightSegments("ab", 99, 1);
    expect(segments).toEqual([
      { text: "a", highlighted: false },
      { text: "b", highlighted: true },
    ]);
  });

  it("reassembles to the original text", () => {
    const text = "select * from t where x='1'";
    const segments = highlightSegments(text, 10, 4);
    expect(segments.map((s) => s.text).join("")).toBe(text);
  });
});
