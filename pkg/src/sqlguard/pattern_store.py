"""File-backed Static Pattern List with stable ids and atomic append.

On-disk format: UTF-8 text with LF line endings and a trailing newline. The
first line is exactly `#sqlia-spl v1`; each following line is
`<id>\\t<source>\\t<created_at>\\t<escaped_text>` where source is `seed` or
`admin`, created_at is ISO-8601 UTC at seconds precision, and escaped_text
escapes backslash, tab, and newline as `\\\\`, `\\t`, `\\n`.

Mutations are single-writer (serialized behind one lock) and write-through:
the new file is written to a temp path and atomically renamed before the
in-memory list changes, so a failed write leaves both file and memory
untouched. Readers work from snapshot() and never observe partial updates.
"""

from __future__ import annotations

import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable

from .automaton import normalize
from .errors import (
    DuplicateTextError,
    EmptyPatternError,
    MalformedLineError,
    NonMonotonicIdError,
)

HEADER = "#sqlia-spl v1"
TIME_FORMAT = "%Y-%m-%dT%H:%M:%SZ"

# Classic signature fragments (tautology, union, piggy-back, comment-evasion
# styles) used to seed fresh deployments and test fixtures. Artifact-defined,
# not an authoritative attack corpus.
DEFAULT_SEED_PATTERNS = (
    "' or '1'='1",
    "or 1=1 --",
    "union select",
    "'; drop table",
    "'; exec xp_cmdshell",
    "admin' --",
)
_SEED_TIMESTAMP = datetime(2024, 1, 1, tzinfo=timezone.utc)


class PatternSource(str, Enum):
    SEED = "seed"
    ADMIN_CONFIRMED = "admin"


@dataclass(frozen=True)
class AnomalyPattern:
    """One normalized signature string in the list."""

    id: int
    text: str
    source: PatternSource
    created_at: datetime  # UTC, seconds precision


def format_timestamp(moment: datetime) -> str:
    return moment.astimezone(timezone.utc).strftime(TIME_FORMAT)


def parse_timestamp(value: str) -> datetime:
    """Strict `2024-01-01T00:00:00Z` parse; raises ValueError otherwise."""
    return datetime.strptime(value, TIME_FORMAT).replace(tzinfo=timezone.utc)


def _escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def _unescape(field: str, line_no: int) -> str:
    out = []
    i = 0
    while i < len(field):
        ch = field[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(field):
            raise MalformedLineError(line_no, "dangling escape at end of text field")
        nxt = field[i + 1]
        if nxt == "\\":
            out.append("\\")
        elif nxt == "t":
            out.append("\t")
        elif nxt == "n":
            out.append("\n")
        else:
            raise MalformedLineError(line_no, f"unknown escape '\\{nxt}'")
        i += 2
    return "".join(out)


class PatternStore:
    """Single-writer, multi-reader pattern list persisted write-through."""

    def __init__(
        self,
        path: str | Path,
        patterns: Iterable[AnomalyPattern] = (),
        clock: Callable[[], datetime] | None = None,
    ):
        self.path = Path(path)
        self._patterns = list(patterns)
        self._by_text = {p.text: p for p in self._patterns}
        self._next_id = self._patterns[-1].id + 1 if self._patterns else 1
        self._lock = threading.Lock()
        self._clock = clock or (lambda: datetime.now(timezone.utc))

    @property
    def next_id(self) -> int:
        return self._next_id

    def __len__(self) -> int:
        return len(self._patterns)

    def snapshot(self) -> tuple[AnomalyPattern, ...]:
        """Immutable view in id order, unaffected by later mutations."""
        with self._lock:
            return tuple(self._patterns)

    def get(self, pattern_id: int) -> AnomalyPattern | None:
        with self._lock:
            for pattern in self._patterns:
                if pattern.id == pattern_id:
                    return pattern
        return None

    def add_pattern(
        self,
        raw_text: str | bytes,
        source: PatternSource = PatternSource.ADMIN_CONFIRMED,
    ) -> tuple[AnomalyPattern, bool]:
        """Append a pattern, deduplicating under normalization.

        Returns (pattern, created). When the normalized text is already
        present the existing pattern comes back with created=False and
        neither file nor memory changes. New patterns hit disk before the
        in-memory list updates; on an I/O failure the store is unchanged.

        Raises EmptyPatternError when raw_text normalizes to nothing.
        """
        text = normalize(raw_text)
        if not text:
            raise EmptyPatternError("pattern text normalizes to empty")
        with self._lock:
            existing = self._by_text.get(text)
            if existing is not None:
                return existing, False
            created_at = self._clock().astimezone(timezone.utc).replace(microsecond=0)
            pattern = AnomalyPattern(self._next_id, text, source, created_at)
            self._write_file(self._patterns + [pattern])
            self._patterns.append(pattern)
            self._by_text[text] = pattern
            self._next_id += 1
            return pattern, True

    def dump(self) -> bytes:
        """Serialized file contents for the current pattern list."""
        with self._lock:
            return self._serialize(self._patterns)

    def save(self) -> None:
        """Rewrite the backing file from memory (normally a no-op byte-wise)."""
        with self._lock:
            self._write_file(self._patterns)

    @staticmethod
    def _serialize(patterns: list[AnomalyPattern]) -> bytes:
        lines = [HEADER]
        for p in patterns:
            lines.append(
                f"{p.id}\t{p.source.value}\t{format_timestamp(p.created_at)}\t{_escape(p.text)}"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")

    def _write_file(self, patterns: list[AnomalyPattern]) -> None:
        data = self._serialize(patterns)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(dir=self.path.parent, prefix=".spl-")
        try:
            with os.fdopen(fd, "wb") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_path, self.path)
        except BaseException:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
            raise


def load_store(
    path: str | Path, clock: Callable[[], datetime] | None = None
) -> PatternStore:
    """Load a pattern file; a missing file yields an empty store (next_id 1).

    Raises MalformedLineError / DuplicateTextError / NonMonotonicIdError with
    the offending 1-based line number.
    """
    path = Path(path)
    if not path.exists():
        return PatternStore(path, (), clock)
    data = path.read_bytes()
    if not data.endswith(b"\n"):
        raise MalformedLineError(data.count(b"\n") + 1, "missing trailing newline")
    lines = data.split(b"\n")[:-1]
    if not lines or lines[0] != HEADER.encode("utf-8"):
        raise MalformedLineError(1, f"first line must be '{HEADER}'")
    patterns: list[AnomalyPattern] = []
    seen: dict[str, int] = {}
    last_id = 0
    for line_no, raw_line in enumerate(lines[1:], start=2):
        try:
            line = raw_line.decode("utf-8")
        except UnicodeDecodeError:
            raise MalformedLineError(line_no, "line is not valid UTF-8") from None
        fields = line.split("\t")
        if len(fields) != 4:
            raise MalformedLineError(
                line_no, f"expected 4 tab-separated fields, got {len(fields)}"
            )
        id_field, source_field, time_field, text_field = fields
        if not id_field.isdigit() or int(id_field) <= 0:
            raise MalformedLineError(line_no, f"bad pattern id {id_field!r}")
        pattern_id = int(id_field)
        try:
            source = PatternSource(source_field)
        except ValueError:
            raise MalformedLineError(line_no, f"bad source {source_field!r}") from None
        try:
            created_at = parse_timestamp(time_field)
        except ValueError:
            raise MalformedLineError(
                line_no, f"bad timestamp {time_field!r}"
            ) from None
        text = _unescape(text_field, line_no)
        if not text or normalize(text) != text:
            raise MalformedLineError(line_no, "pattern text is empty or not normalized")
        if text in seen:
            raise DuplicateTextError(
                line_no, f"duplicate pattern text (first at line {seen[text]})"
            )
        if pattern_id <= last_id:
            raise NonMonotonicIdError(
                line_no, f"id {pattern_id} does not increase past {last_id}"
            )
        seen[text] = line_no
        last_id = pattern_id
        patterns.append(AnomalyPattern(pattern_id, text, source, created_at))
    return PatternStore(path, patterns, clock)


def write_seed_file(path: str | Path) -> PatternStore:
    """Create a fresh pattern file holding the default seed signatures.

    Deterministic output: fixed timestamp, ids 1..n in DEFAULT_SEED_PATTERNS
    order. Refuses to clobber an existing file.
    """
    path = Path(path)
    if path.exists():
        raise FileExistsError(f"{path} already exists")
    store = PatternStore(path, (), clock=lambda: _SEED_TIMESTAMP)
    for text in DEFAULT_SEED_PATTERNS:
        store.add_pattern(text, PatternSource.SEED)
    return store
