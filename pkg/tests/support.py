"""Small shared helpers for building fixture data."""

from __future__ import annotations

from datetime import datetime, timezone

from sqlguard.automaton import normalize
from sqlguard.pattern_store import AnomalyPattern, PatternSource

EPOCH = datetime(2024, 1, 1, tzinfo=timezone.utc)

ATTACK_QUERY = "Select * from login where user='hacker' or '1'='1' —' and pass='something'"
LEGAL_QUERY = "SELECT * FROM user_account WHERE login='John' AND pass='xyz'"
TAUTOLOGY_PATTERN = "' or '1'='1"


def make_patterns(*texts: str, start_id: int = 1) -> tuple[AnomalyPattern, ...]:
    return tuple(
        AnomalyPattern(i, normalize(t), PatternSource.SEED, EPOCH)
        for i, t in enumerate(texts, start_id)
    )
