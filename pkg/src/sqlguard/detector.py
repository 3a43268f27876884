"""Screen one query against the whole pattern list.

An exact pattern match rejects the query outright; otherwise the highest
per-pattern anomaly score decides between alarm (score at or above the
threshold) and accept. Scores are exact rationals so the threshold
comparison is bit-exact even at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .automaton import PatternAutomaton, ScanResult, build_automaton, normalize, scan
from .errors import EmptyPatternError
from .pattern_store import AnomalyPattern


@dataclass(frozen=True)
class DetectorConfig:
    """Screening knobs; threshold_percent is a percentage in (0, 100]."""

    threshold_percent: Fraction = Fraction(50)

    def __post_init__(self):
        object.__setattr__(self, "threshold_percent", Fraction(self.threshold_percent))
        if not 0 < self.threshold_percent <= 100:
            raise ValueError(
                f"threshold_percent must be in (0, 100], got {self.threshold_percent}"
            )


class VerdictKind(str, Enum):
    REJECTED = "rejected"
    ALARM = "alarm"
    ACCEPTED = "accepted"


@dataclass(frozen=True)
class Verdict:
    """Outcome for one query.

    rejected: pattern_id/match_end identify the first exactly-matching
              pattern (lowest id); score is exactly 100.
    alarm:    score lies in [threshold, 100); pattern_id is the best-scoring
              pattern and match_end/match_len frame its deepest prefix hit
              inside the normalized query.
    accepted: score is the maximum score seen, below threshold (0 for an
              empty pattern list); the other fields stay None.
    """

    kind: VerdictKind
    score: Fraction
    pattern_id: int | None = None
    match_end: int | None = None
    match_len: int | None = None


def anomaly_score(result: ScanResult, pattern_len: int) -> Fraction:
    """How much of the pattern its deepest prefix hit covered, as a percentage.

    100 * max_depth / pattern_len, exactly 100 iff the pattern matched in
    full. Raises EmptyPatternError when pattern_len is not positive.
    """
    if pattern_len <= 0:
        raise EmptyPatternError("pattern_len must be positive")
    if result.max_depth > pattern_len:
        raise ValueError(
            f"max_depth {result.max_depth} exceeds pattern_len {pattern_len}"
        )
    return Fraction(100 * result.max_depth, pattern_len)


def format_score(score: Fraction) -> str:
    """Render a score as a fixed 6-fractional-digit decimal string.

    Example: Fraction(700, 11) -> '63.636364'. Used everywhere a score goes
    on the wire or on disk, so clients never see floating-point drift.
    """
    with localcontext() as ctx:
        ctx.prec = 50
        value = Decimal(score.numerator) / Decimal(score.denominator)
        return str(value.quantize(Decimal("0.000001"), rounding=ROUND_HALF_EVEN))


@lru_cache(maxsize=4096)
def _compiled(pattern_text: str) -> PatternAutomaton:
    return build_automaton(pattern_text)


def check_query(
    raw_query: str | bytes,
    patterns: Sequence[AnomalyPattern],
    config: DetectorConfig = DetectorConfig(),
) -> Verdict:
    """Run the full screening pass for one query.

    The query is normalized once and scanned against every pattern in the
    list before any verdict is produced (no early accept). Exact matches win
    over scores; ties on score or multiple exact matches resolve to the
    lowest pattern id. Pure: identical inputs yield identical verdicts.
    """
    query_bytes = normalize(raw_query).encode("utf-8")
    exact: tuple[AnomalyPattern, ScanResult] | None = None
    best: tuple[AnomalyPattern, ScanResult] | None = None
    best_score = Fraction(0)
    for pattern in patterns:
        automaton = _compiled(pattern.text)
        result = scan(automaton, query_bytes)
        if result.exact_match_end is not None:
            if exact is None or pattern.id < exact[0].id:
                exact = (pattern, result)
        score = anomaly_score(result, automaton.pattern_len)
        if best is None or score > best_score or (score == best_score and pattern.id < best[0].id):
            best = (pattern, result)
            best_score = score
    if exact is not None:
        pattern, result = exact
        return Verdict(
            VerdictKind.REJECTED,
            Fraction(100),
            pattern_id=pattern.id,
            match_end=result.exact_match_end,
            match_len=_compiled(pattern.text).pattern_len,
        )
    if best is not None and best_score >= config.threshold_percent:
        pattern, result = best
        return Verdict(
            VerdictKind.ALARM,
            best_score,
            pattern_id=pattern.id,
            match_end=result.max_depth_end,
            match_len=result.max_depth,
        )
    return Verdict(VerdictKind.ACCEPTED, best_score)
