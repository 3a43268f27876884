"""Single-pattern Aho-Corasick automaton over normalized query bytes.

One automaton is built per anomaly pattern; a scan is a single left-to-right
pass that reports both exact matches and the deepest pattern prefix seen
anywhere in the text. Matching is byte-level on the UTF-8 encoding of
normalized text, so multi-byte characters match as plain byte sequences and
every reported offset is a byte offset into the normalized text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import EmptyPatternError, InvalidEncodingError

ROOT = 0

# Only ASCII letters are case-folded; anything outside A-Z passes through
# verbatim so normalization never rewrites multi-byte sequences.
_ASCII_UPPER_TO_LOWER = {c: c + 0x20 for c in range(ord("A"), ord("Z") + 1)}
_WS_RUN = re.compile(r"[ \t\n\r]+")


def normalize(raw: str | bytes) -> str:
    """Canonicalize a query or pattern string.

    ASCII A-Z is lowercased, every run of whitespace (space, tab, LF, CR)
    collapses to a single space, and leading/trailing whitespace is dropped.
    All other characters are preserved verbatim, which makes the function
    idempotent.

    Raises InvalidEncodingError if `raw` is not valid UTF-8.
    """
    if isinstance(raw, bytes):
        try:
            raw = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InvalidEncodingError(f"input is not valid UTF-8: {exc}") from exc
    else:
        try:
            raw.encode("utf-8")
        except UnicodeEncodeError as exc:  # surrogates smuggled into a str
            raise InvalidEncodingError(f"input is not encodable UTF-8: {exc}") from exc
    lowered = raw.translate(_ASCII_UPPER_TO_LOWER)
    return _WS_RUN.sub(" ", lowered).strip(" ")


@dataclass(frozen=True)
class PatternAutomaton:
    """Goto/fail/output machine for one pattern.

    States are 0..pattern_len where state s is the pattern prefix of length
    s, so the goto chain spells the pattern, depth[s] == s, and the single
    terminal state is pattern_len. The automaton is immutable; any number of
    scans may share one instance concurrently.
    """

    pattern: bytes
    fail: tuple[int, ...]
    depth: tuple[int, ...]

    @property
    def pattern_len(self) -> int:
        return len(self.pattern)

    @property
    def state_count(self) -> int:
        return len(self.pattern) + 1

    def goto(self, state: int, byte: int) -> int | None:
        """Goto function; None means FAIL.

        The root absorbs every byte that does not start the pattern (the
        implicit self-loop), so stepping from the root always succeeds.
        """
        if state < len(self.pattern) and self.pattern[state] == byte:
            return state + 1
        if state == ROOT:
            return ROOT
        return None

    def fail_link(self, state: int) -> int:
        return self.fail[state]

    def is_terminal(self, state: int) -> bool:
        return state == len(self.pattern)


@dataclass(frozen=True)
class ScanResult:
    """Evidence from scanning one text against one pattern.

    max_depth is the length of the deepest pattern prefix occurring in the
    text; max_depth_end is the byte offset (exclusive) where that depth was
    first reached, None while max_depth is 0. exact_match_end is the offset
    just past the first full-pattern match, None when the pattern never
    matched (max_depth equals pattern_len exactly when it did). bytes_read
    and fail_follows instrument the single-pass linearity claim.
    """

    exact_match_end: int | None
    max_depth: int
    max_depth_end: int | None
    bytes_read: int
    fail_follows: int


def build_automaton(pattern: str | bytes) -> PatternAutomaton:
    """Construct the automaton for one normalized pattern.

    Fail links are filled in depth (breadth-first) order: each state's link
    points at the state whose path label is the longest proper suffix of its
    own path label that is also a pattern prefix.

    Raises EmptyPatternError for a zero-byte pattern.
    """
    pat = pattern.encode("utf-8") if isinstance(pattern, str) else bytes(pattern)
    if not pat:
        raise EmptyPatternError("cannot build an automaton for an empty pattern")
    m = len(pat)
    fail = [0] * (m + 1)
    # On a single-keyword chain, increasing depth is breadth-first order.
    # State s is entered from s-1 on byte pat[s-1]; walk the parent's fail
    # chain until goto succeeds, defaulting to the root.
    for s in range(2, m + 1):
        f = fail[s - 1]
        b = pat[s - 1]
        while True:
            if pat[f] == b:
                fail[s] = f + 1
                break
            if f == ROOT:
                fail[s] = ROOT
                break
            f = fail[f]
    return PatternAutomaton(pat, tuple(fail), tuple(range(m + 1)))


def step(automaton: PatternAutomaton, state: int, byte: int) -> int:
    """Advance by one byte: follow fail links until goto succeeds.

    Total over all (state, byte) pairs because the root absorbs every
    unmatched byte.
    """
    while True:
        nxt = automaton.goto(state, byte)
        if nxt is not None:
            return nxt
        state = automaton.fail[state]


def scan(automaton: PatternAutomaton, text: str | bytes) -> ScanResult:
    """Scan `text` in one left-to-right pass, reading each byte exactly once.

    Depth can rise at most once per byte and every fail-link hop strictly
    lowers it, so fail_follows never exceeds bytes_read (amortized-linear).
    """
    data = text.encode("utf-8") if isinstance(text, str) else text
    pat = automaton.pattern
    fail = automaton.fail
    m = len(pat)
    state = ROOT
    max_depth = 0
    max_depth_end = None
    exact_end = None
    fail_follows = 0
    i = 0
    for b in data:
        i += 1
        # step() inlined so fail-link traversals can be counted
        while True:
            if state < m and pat[state] == b:
                state += 1
                break
            if state == ROOT:
                break
            state = fail[state]
            fail_follows += 1
        if state > max_depth:
            max_depth = state
            max_depth_end = i
            if state == m and exact_end is None:
                exact_end = i
    return ScanResult(exact_end, max_depth, max_depth_end, len(data), fail_follows)
