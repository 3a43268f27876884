"""Append-only alarm journal and the admin decision state machine.

Every state change appends a full superseding JSON record with the same id;
replay applies records in file order so the latest one per id wins. Confirm
composes two writers in a fixed order (pattern file first, then journal), so
a crash between the two can leave an extra pattern but never a confirmed
alarm without its pattern.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Callable

from .automaton import normalize
from .detector import Verdict, VerdictKind, format_score
from .errors import AlreadyDecidedError, MalformedLineError, UnknownAlarmError
from .pattern_store import (
    PatternSource,
    PatternStore,
    format_timestamp,
    parse_timestamp,
)


class AlarmStatus(str, Enum):
    PENDING = "pending"
    CONFIRMED = "confirmed"
    DISMISSED = "dismissed"


@dataclass(frozen=True)
class AlarmRecord:
    """One escalated query awaiting (or past) an administrator decision."""

    id: int
    raw_query: str
    normalized_query: str
    score: Fraction
    best_pattern_id: int
    status: AlarmStatus
    new_pattern_id: int | None = None
    raised_at: datetime | None = None
    decided_at: datetime | None = None


def suggest_pattern(record: AlarmRecord) -> str:
    """Default pattern text offered to the administrator: the full
    normalized query, which they edit down to the injected fragment."""
    return record.normalized_query


def serialize_record(record: AlarmRecord) -> str:
    """One journal line (no trailing newline), fixed field order."""
    obj: dict = {
        "id": record.id,
        "raw_query": record.raw_query,
        "normalized_query": record.normalized_query,
        "score": format_score(record.score),
        "best_pattern_id": record.best_pattern_id,
        "status": record.status.value,
    }
    if record.new_pattern_id is not None:
        obj["new_pattern_id"] = record.new_pattern_id
    obj["raised_at"] = format_timestamp(record.raised_at)
    if record.decided_at is not None:
        obj["decided_at"] = format_timestamp(record.decided_at)
    return json.dumps(obj, ensure_ascii=False, separators=(",", ":"))


def parse_record_line(line: str, line_no: int = 1) -> AlarmRecord:
    """Parse one journal line back into a record.

    Raises MalformedLineError carrying `line_no` on any structural problem.
    """

    def fail(message: str):
        raise MalformedLineError(line_no, message)

    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        fail(f"bad JSON: {exc}")
    if not isinstance(obj, dict):
        fail("journal line is not a JSON object")
    try:
        alarm_id = obj["id"]
        raw_query = obj["raw_query"]
        normalized_query = obj["normalized_query"]
        score_text = obj["score"]
        best_pattern_id = obj["best_pattern_id"]
        status_text = obj["status"]
        raised_text = obj["raised_at"]
    except KeyError as exc:
        fail(f"missing field {exc.args[0]!r}")
    if not isinstance(alarm_id, int) or isinstance(alarm_id, bool) or alarm_id <= 0:
        fail("'id' must be a positive integer")
    if not isinstance(raw_query, str) or not isinstance(normalized_query, str):
        fail("'raw_query' and 'normalized_query' must be strings")
    if not isinstance(best_pattern_id, int) or isinstance(best_pattern_id, bool):
        fail("'best_pattern_id' must be an integer")
    if not isinstance(score_text, str):
        fail("'score' must be a decimal string")
    try:
        score = Fraction(score_text)
    except (ValueError, ZeroDivisionError):
        fail(f"bad score {score_text!r}")
    try:
        status = AlarmStatus(status_text)
    except ValueError:
        fail(f"bad status {status_text!r}")
    new_pattern_id = obj.get("new_pattern_id")
    if status is AlarmStatus.CONFIRMED:
        if not isinstance(new_pattern_id, int) or isinstance(new_pattern_id, bool):
            fail("confirmed record needs an integer 'new_pattern_id'")
    elif new_pattern_id is not None:
        fail("'new_pattern_id' is only valid on confirmed records")
    try:
        raised_at = parse_timestamp(raised_text)
    except (ValueError, TypeError):
        fail(f"bad raised_at {raised_text!r}")
    decided_text = obj.get("decided_at")
    decided_at = None
    if status is AlarmStatus.PENDING:
        if decided_text is not None:
            fail("pending record must not carry 'decided_at'")
    else:
        try:
            decided_at = parse_timestamp(decided_text)
        except (ValueError, TypeError):
            fail(f"bad decided_at {decided_text!r}")
    return AlarmRecord(
        alarm_id,
        raw_query,
        normalized_query,
        score,
        best_pattern_id,
        status,
        new_pattern_id,
        raised_at,
        decided_at,
    )


class AlarmQueue:
    """Journal-backed queue of escalations; single writer, snapshot readers."""

    def __init__(
        self,
        path: str | Path,
        records: dict[int, AlarmRecord] | None = None,
        clock: Callable[[], datetime] | None = None,
    ):
        self.path = Path(path)
        self._records: dict[int, AlarmRecord] = dict(records or {})
        self._next_id = max(self._records, default=0) + 1
        self._lock = threading.Lock()
        self._clock = clock or (lambda: datetime.now(timezone.utc))

    def __len__(self) -> int:
        return len(self._records)

    def records(self, status: AlarmStatus | None = None) -> list[AlarmRecord]:
        """Current state of every alarm (latest per id), in id order."""
        with self._lock:
            rows = [self._records[k] for k in sorted(self._records)]
        if status is None:
            return rows
        return [r for r in rows if r.status is status]

    def get(self, alarm_id: int) -> AlarmRecord:
        with self._lock:
            record = self._records.get(alarm_id)
        if record is None:
            raise UnknownAlarmError(f"no alarm with id {alarm_id}")
        return record

    def raise_alarm(self, raw_query: str | bytes, verdict: Verdict) -> AlarmRecord:
        """Append a pending record for an alarm verdict; persisted before return."""
        if verdict.kind is not VerdictKind.ALARM:
            raise ValueError(f"raise_alarm requires an alarm verdict, got {verdict.kind.value}")
        with self._lock:
            raw_text = raw_query.decode("utf-8") if isinstance(raw_query, bytes) else raw_query
            record = AlarmRecord(
                id=self._next_id,
                raw_query=raw_text,
                normalized_query=normalize(raw_text),
                score=verdict.score,
                best_pattern_id=verdict.pattern_id,
                status=AlarmStatus.PENDING,
                raised_at=self._now(),
            )
            self._append(record)
            self._records[record.id] = record
            self._next_id += 1
            return record

    def confirm(self, alarm_id: int, pattern_text: str, store: PatternStore) -> AlarmRecord:
        """Admin confirms an attack: mint the pattern, then mark the alarm.

        The pattern lands in the store before the journal changes; if the
        journal write then fails the alarm stays pending (at worst an extra
        pattern exists, which is harmless and idempotent to re-confirm).
        """
        with self._lock:
            pending = self._checked_pending(alarm_id)
            pattern, _ = store.add_pattern(pattern_text, PatternSource.ADMIN_CONFIRMED)
            decided = replace(
                pending,
                status=AlarmStatus.CONFIRMED,
                new_pattern_id=pattern.id,
                decided_at=self._now(),
            )
            self._append(decided)
            self._records[alarm_id] = decided
            return decided

    def dismiss(self, alarm_id: int) -> AlarmRecord:
        """Admin dismisses a false alarm; the pattern store is untouched."""
        with self._lock:
            pending = self._checked_pending(alarm_id)
            decided = replace(pending, status=AlarmStatus.DISMISSED, decided_at=self._now())
            self._append(decided)
            self._records[alarm_id] = decided
            return decided

    def _checked_pending(self, alarm_id: int) -> AlarmRecord:
        record = self._records.get(alarm_id)
        if record is None:
            raise UnknownAlarmError(f"no alarm with id {alarm_id}")
        if record.status is not AlarmStatus.PENDING:
            raise AlreadyDecidedError(
                f"alarm {alarm_id} is already {record.status.value}"
            )
        return record

    def _now(self) -> datetime:
        return self._clock().astimezone(timezone.utc).replace(microsecond=0)

    def _append(self, record: AlarmRecord) -> None:
        line = serialize_record(record) + "\n"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "ab") as handle:
            handle.write(line.encode("utf-8"))
            handle.flush()
            os.fsync(handle.fileno())


def load_queue(
    path: str | Path, clock: Callable[[], datetime] | None = None
) -> AlarmQueue:
    """Replay a journal; a missing file yields an empty queue.

    Later records supersede earlier ones with the same id. Raises
    MalformedLineError with the offending line number on structural damage.
    """
    path = Path(path)
    if not path.exists():
        return AlarmQueue(path, None, clock)
    data = path.read_bytes()
    if data and not data.endswith(b"\n"):
        raise MalformedLineError(data.count(b"\n") + 1, "missing trailing newline")
    records: dict[int, AlarmRecord] = {}
    for line_no, raw_line in enumerate(data.split(b"\n")[:-1], start=1):
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedLineError(line_no, "line is not valid UTF-8") from None
        record = parse_record_line(line, line_no)
        records[record.id] = record
    return AlarmQueue(path, records, clock)
