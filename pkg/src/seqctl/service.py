"""HTTP session service: a solved strategy exposed for live stepwise use.

State is in memory only; each session serializes its own requests while
distinct sessions proceed independently. The export endpoint is the
persistence story.
"""

from __future__ import annotations

import threading
import uuid
from datetime import datetime, timezone

from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .errors import SeqctlError, SessionFinishedError, UnknownIdError
from .limit import RegionReport
from .problem import TestingProblem
from .strategy import Session, Strategy


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class SessionRecord:
    """One live session plus bookkeeping; requests to it are serialized."""

    def __init__(self, session: Session, fingerprint: str, descriptor: dict):
        self.id = uuid.uuid4().hex[:12]
        self.session = session
        self.fingerprint = fingerprint
        self.descriptor = descriptor
        self.created = _now()
        self.updated = self.created
        self.lock = threading.Lock()

    def view(self) -> dict:
        out = {"id": self.id}
        out.update(self.session.state.to_json_dict())
        return out

    def export(self) -> dict:
        return {
            "id": self.id,
            "fingerprint": self.fingerprint,
            "strategy": self.descriptor,
            "created": self.created,
            "updated": self.updated,
            "state": self.session.state.to_json_dict(),
        }


def create_app(problem: TestingProblem, strategy: Strategy,
               region: RegionReport | None, pathological: bool) -> FastAPI:
    problem.require_valid()
    app = FastAPI(title="seqctl session service")
    records: dict[str, SessionRecord] = {}
    registry_lock = threading.Lock()
    descriptor = strategy.descriptor()

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.get("/v1/meta")
    def meta():
        return {
            "model": problem.model.to_json_dict(),
            "cost": problem.cost.to_json_dict(),
            "strategy": descriptor,
            "region": region.to_json_dict() if region else None,
            "pathological": pathological,
            "fingerprint": problem.fingerprint(),
        }

    @app.post("/v1/sessions", status_code=201)
    def create_session():
        record = SessionRecord(Session(problem.model, problem.cost, strategy),
                               problem.fingerprint(), descriptor)
        with registry_lock:
            records[record.id] = record
        return record.view()

    def _get(session_id: str) -> SessionRecord | None:
        with registry_lock:
            return records.get(session_id)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str):
        record = _get(session_id)
        if record is None:
            return error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        with record.lock:
            return record.view()

    @app.post("/v1/sessions/{session_id}/observe")
    def observe(session_id: str, body: dict):
        record = _get(session_id)
        if record is None:
            return error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        outcome = body.get("outcome")
        if not isinstance(outcome, str):
            return error(400, "BAD_REQUEST", "body must carry an 'outcome' string")
        with record.lock:
            try:
                record.session.advance(outcome)
            except SessionFinishedError as exc:
                return error(409, exc.code, exc.message)
            except UnknownIdError as exc:
                return error(400, exc.code, exc.message)
            except SeqctlError as exc:
                return error(400, exc.code, exc.message)
            record.updated = _now()
            return record.view()

    @app.get("/v1/sessions/{session_id}/export")
    def export(session_id: str):
        record = _get(session_id)
        if record is None:
            return error(404, "UNKNOWN_SESSION", f"no session {session_id!r}")
        with record.lock:
            return record.export()

    return app


__all__ = ["create_app", "SessionRecord"]
