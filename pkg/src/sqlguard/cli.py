"""Command-line front end.

Subcommands: check, scan-log, patterns list|add, alarms list|confirm|dismiss,
serve. Machine output is JSON lines on stdout; diagnostics go to stderr.
Check exit codes map the verdict (0 accepted, 2 alarm, 3 rejected, 1 error)
so scripts can branch on them.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .alarm_queue import AlarmQueue, load_queue, serialize_record
from .detector import DetectorConfig, Verdict, VerdictKind, check_query, format_score
from .errors import SqlGuardError
from .pattern_store import PatternStore, format_timestamp, load_store

EXIT_ACCEPTED = 0
EXIT_ERROR = 1
EXIT_ALARM = 2
EXIT_REJECTED = 3

_VERDICT_EXIT = {
    VerdictKind.ACCEPTED: EXIT_ACCEPTED,
    VerdictKind.ALARM: EXIT_ALARM,
    VerdictKind.REJECTED: EXIT_REJECTED,
}


@dataclass
class ScanReport:
    """Per-line verdicts plus summary counts for one log scan."""

    total: int = 0
    accepted: int = 0
    alarmed: int = 0
    rejected: int = 0
    lines: list[dict] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "total": self.total,
            "accepted": self.accepted,
            "alarmed": self.alarmed,
            "rejected": self.rejected,
            "lines": self.lines,
        }


def _emit(obj: dict) -> None:
    print(json.dumps(obj, ensure_ascii=False, separators=(",", ":")))


def _diag(message: str) -> None:
    print(f"sqlguard: {message}", file=sys.stderr)


def _verdict_json(verdict: Verdict) -> dict:
    obj: dict = {"verdict": verdict.kind.value, "score": format_score(verdict.score)}
    if verdict.pattern_id is not None:
        obj["pattern_id"] = verdict.pattern_id
    if verdict.match_end is not None:
        obj["match_end"] = verdict.match_end
    return obj


def _pattern_json(pattern) -> dict:
    return {
        "id": pattern.id,
        "text": pattern.text,
        "source": pattern.source.value,
        "created_at": format_timestamp(pattern.created_at),
    }


def _load_store_or_fail(path: str) -> PatternStore:
    try:
        return load_store(path)
    except SqlGuardError as exc:
        _diag(f"pattern file {path}: {exc}")
        raise SystemExit(EXIT_ERROR) from exc


def _load_queue_or_fail(path: str) -> AlarmQueue:
    try:
        return load_queue(path)
    except SqlGuardError as exc:
        _diag(f"alarm journal {path}: {exc}")
        raise SystemExit(EXIT_ERROR) from exc


def _threshold_config(args) -> DetectorConfig:
    try:
        return DetectorConfig(Fraction(args.threshold))
    except (ValueError, ZeroDivisionError) as exc:
        _diag(f"bad threshold {args.threshold!r}: {exc}")
        raise SystemExit(EXIT_ERROR) from exc


def cmd_check(args) -> int:
    store = _load_store_or_fail(args.patterns)
    config = _threshold_config(args)
    try:
        verdict = check_query(args.query, store.snapshot(), config)
    except SqlGuardError as exc:
        _diag(str(exc))
        return EXIT_ERROR
    payload = _verdict_json(verdict)
    if verdict.kind is VerdictKind.ALARM and args.alarms:
        queue = _load_queue_or_fail(args.alarms)
        try:
            record = queue.raise_alarm(args.query, verdict)
        except OSError as exc:
            _diag(f"failed to journal alarm: {exc}")
            return EXIT_ERROR
        payload["alarm_id"] = record.id
    _emit(payload)
    return _VERDICT_EXIT[verdict.kind]


def cmd_scan_log(args) -> int:
    store = _load_store_or_fail(args.patterns)
    config = _threshold_config(args)
    try:
        data = Path(args.log_file).read_bytes()
    except OSError as exc:
        _diag(f"cannot read {args.log_file}: {exc}")
        return EXIT_ERROR
    patterns = store.snapshot()
    report = ScanReport()
    for line_no, raw_line in enumerate(data.split(b"\n"), start=1):
        if not raw_line.strip():
            continue
        try:
            query = raw_line.decode("utf-8")
        except UnicodeDecodeError:
            report.total += 1
            report.rejected += 1
            report.lines.append(
                {"line_no": line_no, "verdict": "rejected", "error": "invalid utf-8"}
            )
            continue
        verdict = check_query(query, patterns, config)
        report.total += 1
        if verdict.kind is VerdictKind.ACCEPTED:
            report.accepted += 1
        elif verdict.kind is VerdictKind.ALARM:
            report.alarmed += 1
        else:
            report.rejected += 1
        record = {"line_no": line_no}
        record.update(_verdict_json(verdict))
        report.lines.append(record)
    _emit(report.to_json())
    return EXIT_ACCEPTED


def cmd_patterns(args) -> int:
    store = _load_store_or_fail(args.patterns)
    if args.patterns_command == "list":
        for pattern in store.snapshot():
            _emit(_pattern_json(pattern))
        return EXIT_ACCEPTED
    # add
    try:
        pattern, created = store.add_pattern(args.text)
    except SqlGuardError as exc:
        _diag(str(exc))
        return EXIT_ERROR
    except OSError as exc:
        _diag(f"failed to persist pattern: {exc}")
        return EXIT_ERROR
    _emit({**_pattern_json(pattern), "created": created})
    return EXIT_ACCEPTED


def cmd_alarms(args) -> int:
    queue = _load_queue_or_fail(args.alarms)
    if args.alarms_command == "list":
        for record in queue.records():
            print(serialize_record(record))
        return EXIT_ACCEPTED
    try:
        if args.alarms_command == "confirm":
            store = _load_store_or_fail(args.patterns)
            record = queue.confirm(args.alarm_id, args.text, store)
        else:
            record = queue.dismiss(args.alarm_id)
    except SqlGuardError as exc:
        _diag(str(exc))
        return EXIT_ERROR
    except OSError as exc:
        _diag(f"failed to persist decision: {exc}")
        return EXIT_ERROR
    print(serialize_record(record))
    return EXIT_ACCEPTED


def cmd_serve(args) -> int:
    # service imports (fastapi/uvicorn) stay lazy so one-shot commands start fast
    import uvicorn

    from .service import AlarmPolicy, ServiceConfig, create_app

    try:
        threshold = Fraction(args.threshold)
    except (ValueError, ZeroDivisionError) as exc:
        _diag(f"bad threshold {args.threshold!r}: {exc}")
        return EXIT_ERROR
    config = ServiceConfig(
        listen_address=args.listen,
        pattern_file=args.patterns,
        alarm_file=args.alarms,
        threshold_percent=threshold,
        alarm_policy=AlarmPolicy(args.alarm_policy),
    )
    store = _load_store_or_fail(args.patterns)
    queue = _load_queue_or_fail(args.alarms)
    app = create_app(config, store=store, queue=queue)
    host, _, port_text = args.listen.rpartition(":")
    if not host or not port_text.isdigit():
        _diag(f"bad listen address {args.listen!r}, expected host:port")
        return EXIT_ERROR
    try:
        uvicorn.run(app, host=host, port=int(port_text), log_level="warning")
    except SystemExit as exc:  # uvicorn exits 3 on startup/bind failure
        if exc.code:
            _diag("server failed to start")
            return EXIT_ERROR
    return EXIT_ACCEPTED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sqlguard",
        description="Screen SQL queries against a curated anomaly-pattern list.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, alarms_default=None):
        p.add_argument("--patterns", default="patterns.spl", help="pattern file path")
        p.add_argument("--threshold", default="50", help="alarm threshold percent")
        p.add_argument("--alarms", default=alarms_default, help="alarm journal path")

    p_check = sub.add_parser("check", help="screen one query")
    p_check.add_argument("query")
    add_common(p_check)
    p_check.set_defaults(handler=cmd_check)

    p_scan = sub.add_parser("scan-log", help="screen a file of queries, one per line")
    p_scan.add_argument("log_file")
    add_common(p_scan)
    p_scan.set_defaults(handler=cmd_scan_log)

    p_patterns = sub.add_parser("patterns", help="inspect or grow the pattern list")
    patterns_sub = p_patterns.add_subparsers(dest="patterns_command", required=True)
    p_list = patterns_sub.add_parser("list", help="print patterns as JSON lines")
    add_common(p_list)
    p_list.set_defaults(handler=cmd_patterns)
    p_add = patterns_sub.add_parser("add", help="append one pattern")
    p_add.add_argument("text")
    add_common(p_add)
    p_add.set_defaults(handler=cmd_patterns)

    p_alarms = sub.add_parser("alarms", help="inspect or decide alarms")
    alarms_sub = p_alarms.add_subparsers(dest="alarms_command", required=True)
    a_list = alarms_sub.add_parser("list", help="print alarms as JSON lines")
    add_common(a_list, alarms_default="alarms.jsonl")
    a_list.set_defaults(handler=cmd_alarms)
    a_confirm = alarms_sub.add_parser("confirm", help="confirm an alarm with a pattern")
    a_confirm.add_argument("alarm_id", type=int)
    a_confirm.add_argument("text")
    add_common(a_confirm, alarms_default="alarms.jsonl")
    a_confirm.set_defaults(handler=cmd_alarms)
    a_dismiss = alarms_sub.add_parser("dismiss", help="dismiss an alarm")
    a_dismiss.add_argument("alarm_id", type=int)
    add_common(a_dismiss, alarms_default="alarms.jsonl")
    a_dismiss.set_defaults(handler=cmd_alarms)

    p_serve = sub.add_parser("serve", help="run the HTTP detection service")
    add_common(p_serve, alarms_default="alarms.jsonl")
    p_serve.add_argument("--listen", default="127.0.0.1:8000", help="host:port to bind")
    p_serve.add_argument(
        "--alarm-policy",
        choices=["allow", "block"],
        default="allow",
        help="response policy for alarmed queries",
    )
    p_serve.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; remap
        return EXIT_ERROR if exc.code else EXIT_ACCEPTED
    try:
        return args.handler(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
