"""HTTP facade wiring the detector, pattern store, and alarm queue.

Endpoints (JSON over HTTP/1.1):
    POST /v1/check                     screen one query, journal alarms
    GET  /v1/patterns                  list the pattern list
    POST /v1/patterns                  append a pattern (idempotent)
    GET  /v1/alarms?status=...         list alarms, optionally filtered
    POST /v1/alarms/{id}/decision      confirm or dismiss one alarm
    GET  /v1/health                    liveness plus basic counts

Checks read an immutable snapshot of the pattern list taken at request
start, so a verdict never mixes pattern-list versions; mutations serialize
behind the store/queue locks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .alarm_queue import AlarmQueue, AlarmRecord, AlarmStatus, load_queue
from .automaton import build_automaton, scan
from .detector import DetectorConfig, VerdictKind, check_query, format_score
from .errors import (
    AlreadyDecidedError,
    EmptyPatternError,
    InvalidEncodingError,
    UnknownAlarmError,
)
from .pattern_store import AnomalyPattern, PatternStore, format_timestamp, load_store


class AlarmPolicy(str, Enum):
    ALLOW_AND_LOG = "allow"
    BLOCK = "block"


@dataclass
class ServiceConfig:
    listen_address: str = "127.0.0.1:8000"
    pattern_file: str | Path = "patterns.spl"
    alarm_file: str | Path = "alarms.jsonl"
    threshold_percent: Fraction = Fraction(50)
    alarm_policy: AlarmPolicy = AlarmPolicy.ALLOW_AND_LOG


class CheckBody(BaseModel):
    query: str


class PatternBody(BaseModel):
    text: str


class DecisionBody(BaseModel):
    action: str
    pattern_text: str | None = None


def _pattern_json(pattern: AnomalyPattern) -> dict:
    return {
        "id": pattern.id,
        "text": pattern.text,
        "source": pattern.source.value,
        "created_at": format_timestamp(pattern.created_at),
    }


def _alarm_json(record: AlarmRecord, store: PatternStore) -> dict:
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
    # Derived highlight data for the admin console: where the deepest prefix
    # of the best pattern sits inside the normalized query. Recomputed from
    # the immutable pattern text, never persisted.
    best = store.get(record.best_pattern_id)
    if best is not None:
        result = scan(build_automaton(best.text), record.normalized_query)
        obj["pattern_text"] = best.text
        obj["match_end"] = result.max_depth_end
        obj["match_len"] = result.max_depth
    return obj


def create_app(
    config: ServiceConfig,
    *,
    store: PatternStore | None = None,
    queue: AlarmQueue | None = None,
) -> FastAPI:
    """Build the application; loads the stores unless instances are passed in."""
    store = store if store is not None else load_store(config.pattern_file)
    queue = queue if queue is not None else load_queue(config.alarm_file)
    detector_config = DetectorConfig(config.threshold_percent)

    app = FastAPI(title="sqlguard", version="0.1.0", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.queue = queue

    @app.exception_handler(RequestValidationError)
    def _bad_request(request, exc):
        return JSONResponse(status_code=400, content={"error": "malformed request body"})

    @app.post("/v1/check")
    def handle_check(body: CheckBody):
        patterns = store.snapshot()
        try:
            verdict = check_query(body.query, patterns, detector_config)
        except InvalidEncodingError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        payload: dict = {
            "verdict": verdict.kind.value,
            "score": format_score(verdict.score),
        }
        if verdict.pattern_id is not None:
            payload["pattern_id"] = verdict.pattern_id
        if verdict.match_end is not None:
            payload["match_end"] = verdict.match_end
        if verdict.kind is VerdictKind.ALARM:
            try:
                record = queue.raise_alarm(body.query, verdict)
            except OSError as exc:
                return JSONResponse(
                    status_code=500,
                    content={"error": f"alarm persistence failed: {exc}"},
                )
            payload["alarm_id"] = record.id
            if config.alarm_policy is AlarmPolicy.BLOCK:
                payload["verdict"] = VerdictKind.REJECTED.value
        return payload

    @app.get("/v1/patterns")
    def handle_patterns_list():
        return {"patterns": [_pattern_json(p) for p in store.snapshot()]}

    @app.post("/v1/patterns")
    def handle_patterns_add(body: PatternBody):
        try:
            pattern, created = store.add_pattern(body.text)
        except EmptyPatternError:
            return JSONResponse(
                status_code=400, content={"error": "pattern text normalizes to empty"}
            )
        except InvalidEncodingError as exc:
            return JSONResponse(status_code=400, content={"error": str(exc)})
        except OSError as exc:
            return JSONResponse(
                status_code=500, content={"error": f"pattern persistence failed: {exc}"}
            )
        return JSONResponse(status_code=201 if created else 200, content=_pattern_json(pattern))

    @app.get("/v1/alarms")
    def handle_alarms_list(status: str | None = None):
        wanted: AlarmStatus | None = None
        if status is not None:
            try:
                wanted = AlarmStatus(status)
            except ValueError:
                return JSONResponse(
                    status_code=400, content={"error": f"unknown status {status!r}"}
                )
        return {"alarms": [_alarm_json(r, store) for r in queue.records(wanted)]}

    @app.post("/v1/alarms/{alarm_id}/decision")
    def handle_decision(alarm_id: int, body: DecisionBody):
        try:
            if body.action == "confirm":
                if body.pattern_text is None:
                    return JSONResponse(
                        status_code=400,
                        content={"error": "confirm requires pattern_text"},
                    )
                record = queue.confirm(alarm_id, body.pattern_text, store)
            elif body.action == "dismiss":
                record = queue.dismiss(alarm_id)
            else:
                return JSONResponse(
                    status_code=400, content={"error": f"unknown action {body.action!r}"}
                )
        except UnknownAlarmError as exc:
            return JSONResponse(status_code=404, content={"error": str(exc)})
        except AlreadyDecidedError as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except EmptyPatternError:
            return JSONResponse(
                status_code=400, content={"error": "pattern text normalizes to empty"}
            )
        except OSError as exc:
            return JSONResponse(
                status_code=500, content={"error": f"persistence failed: {exc}"}
            )
        return _alarm_json(record, store)

    @app.get("/v1/health")
    def handle_health():
        return {
            "status": "ok",
            "patterns": len(store.snapshot()),
            "pending_alarms": len(queue.records(AlarmStatus.PENDING)),
        }

    return app
