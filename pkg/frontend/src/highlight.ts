export interface Segment {
  text: string;
  highlighted: boolean;
}

/**
 * Split a normalized query into plain/highlighted segments from the byte
 * span the API reports (match_end exclusive, match_len bytes long). Offsets
 * are bytes into the UTF-8 encoding, so they are mapped to character
 * positions before slicing; out-of-range spans clamp to the text.
 */
export function highlightSegments(
  text: string,
  matchEnd: number | null | undefined,
  matchLen: number | null | undefined,
): Segment[] {
  if (matchEnd == null || matchLen == null || matchLen <= 0) {
    return text ? [{ text, highlighted: false }] : [];
  }
  const encoder = new TextEncoder();
  const byteToChar = new Map<number, number>();
  let byteIndex = 0;
  for (let charIndex = 0; charIndex < text.length; charIndex++) {
    byteToChar.set(byteIndex, charIndex);
    const codePoint = text.codePointAt(charIndex)!;
    if (codePoint > 0xffff) {
      charIndex++; // surrogate pair occupies two UTF-16 units
    }
    byteIndex += encoder.encode(String.fromCodePoint(codePoint)).length;
  }
  byteToChar.set(byteIndex, text.length);

  const endByte = Math.min(matchEnd, byteIndex);
  const startByte = Math.max(0, endByte - matchLen);
  const start = byteToChar.get(startByte) ?? 0;
  const end = byteToChar.get(endByte) ?? text.length;

  const segments: Segment[] = [];
  if (start > 0) segments.push({ text: text.slice(0, start), highlighted: false });
  if (end > start) segments.push({ text: text.slice(start, end), highlighted: true });
  if (end < text.length) segments.push({ text: text.slice(end), highlighted: false });
  return segments;
}
