"""sqlguard: SQL injection screening with a curated anomaly-pattern list.

Queries are normalized and scanned against every stored pattern with a
per-pattern Aho-Corasick automaton. Exact matches reject the query; partial
prefix coverage above a threshold raises an alarm for an administrator whose
confirmations grow the pattern list at runtime.
"""

from .alarm_queue import (
    AlarmQueue,
    AlarmRecord,
    AlarmStatus,
    load_queue,
    suggest_pattern,
)
from .automaton import PatternAutomaton, ScanResult, build_automaton, normalize, scan, step
from .detector import (
    DetectorConfig,
    Verdict,
    VerdictKind,
    anomaly_score,
    check_query,
    format_score,
)
from .errors import (
    AlreadyDecidedError,
    DuplicateTextError,
    EmptyPatternError,
    InvalidEncodingError,
    MalformedLineError,
    NonMonotonicIdError,
    SqlGuardError,
    StoreFileError,
    UnknownAlarmError,
)
from .pattern_store import (
    DEFAULT_SEED_PATTERNS,
    AnomalyPattern,
    PatternSource,
    PatternStore,
    load_store,
    write_seed_file,
)

__version__ = "0.1.0"

__all__ = [
    "AlarmQueue",
    "AlarmRecord",
    "AlarmStatus",
    "AlreadyDecidedError",
    "AnomalyPattern",
    "DEFAULT_SEED_PATTERNS",
    "DetectorConfig",
    "DuplicateTextError",
    "EmptyPatternError",
    "InvalidEncodingError",
    "MalformedLineError",
    "NonMonotonicIdError",
    "PatternAutomaton",
    "PatternSource",
    "PatternStore",
    "ScanResult",
    "SqlGuardError",
    "StoreFileError",
    "UnknownAlarmError",
    "Verdict",
    "VerdictKind",
    "anomaly_score",
    "build_automaton",
    "check_query",
    "format_score",
    "load_queue",
    "load_store",
    "normalize",
    "scan",
    "step",
    "suggest_pattern",
    "write_seed_file",
]
