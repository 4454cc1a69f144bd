"""HTTP session service: the surface the web UI and scripted clients drive.

Endpoints (all JSON):

    GET  /api/problems                problem id, title, statement
    POST /api/sessions                {problem_id, code} -> first-round result
    POST /api/sessions/{id}/submit    {code} -> round result
    GET  /api/sessions/{id}           full public history

Responses never contain test inputs/outputs or pool code: the public score is
only the AC rate and the all-passed flag, and suggestions go through the
agent's leakage guard. Sessions persist as one JSON file each, so a restarted
service reconstructs its state from disk. A per-session round cap bounds
abuse.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .agent import AgentConfig, DebugTeacher
from .corpus import Dataset
from .judge import Judge
from .llmgw import Gateway, GatewayError

DEFAULT_ROUND_CAP = 10


class CreateSessionBody(BaseModel):
    problem_id: str
    code: str


class SubmitBody(BaseModel):
    code: str


@dataclass
class LiveSession:
    id: str
    problem_id: str
    created_at: float
    round_count: int = 0
    solved: bool = False
    history: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "session_id": self.id,
            "problem_id": self.problem_id,
            "created_at": self.created_at,
            "round_count": self.round_count,
            "solved": self.solved,
            "rounds": self.history,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LiveSession":
        return cls(
            id=data["session_id"],
            problem_id=data["problem_id"],
            created_at=data["created_at"],
            round_count=data["round_count"],
            solved=data["solved"],
            history=list(data["rounds"]),
        )


class SessionStore:
    """Disk-backed session map; state is reconstructable after a restart."""

    def __init__(self, data_dir: str | Path):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, LiveSession] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.json"

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, problem_id: str) -> LiveSession:
        session = LiveSession(
            id=uuid.uuid4().hex, problem_id=problem_id, created_at=time.time()
        )
        with self._guard:
            self._sessions[session.id] = session
        self.save(session)
        return session

    def get(self, session_id: str) -> LiveSession | None:
        with self._guard:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        path = self._path(session_id)
        if not path.exists():
            return None
        session = LiveSession.from_dict(json.loads(path.read_text(encoding="utf-8")))
        with self._guard:
            self._sessions.setdefault(session_id, session)
        return self._sessions[session_id]

    def save(self, session: LiveSession) -> None:
        self._path(session.id).write_text(
            json.dumps(session.to_dict(), indent=2) + "\n", encoding="utf-8"
        )


def create_app(
    dataset: Dataset,
    judge: Judge,
    gateway: Gateway,
    agent_config: AgentConfig | None = None,
    data_dir: str | Path = "runs/service",
    round_cap: int = DEFAULT_ROUND_CAP,
    bearer_token: str = "",
    static_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="DebugTA session service")
    store = SessionStore(data_dir)
    problems = {p.id: p for p in dataset.problems}

    @app.exception_handler(RequestValidationError)
    async def malformed_body(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": str(exc.errors()[:3])})

    def check_auth(request: Request) -> None:
        if not bearer_token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {bearer_token}":
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    def run_round(session: LiveSession, code: str) -> dict:
        if session.round_count >= round_cap:
            raise HTTPException(
                status_code=429, detail=f"round cap reached ({round_cap})"
            )
        problem = problems[session.problem_id]
        compile_report = judge.compile(code)
        result = judge.run_tests(code, problem)
        suggestions: list[str] = []
        if result.ac_all:
            session.solved = True
        else:
            teacher = DebugTeacher(gateway, judge, agent_config)
            try:
                suggestion_set = teacher.debug_and_teach(code, problem)
            except GatewayError as exc:
                raise HTTPException(
                    status_code=502,
                    detail={"error": str(exc), "retryable": True},
                ) from exc
            suggestions = list(suggestion_set.items)
        session.round_count += 1
        response = {
            "round": session.round_count,
            "compile_report_messages": compile_report.messages,
            "ac_rate": result.ac_rate,
            "ac_all": result.ac_all,
            "suggestions": suggestions,
        }
        session.history.append({**response, "submitted_code": code})
        store.save(session)
        return response

    @app.get("/api/problems")
    def list_problems(request: Request):
        check_auth(request)
        return [
            {"id": p.id, "title": p.title, "statement": p.statement}
            for p in dataset.problems
        ]

    @app.post("/api/sessions")
    def create_session(body: CreateSessionBody, request: Request):
        check_auth(request)
        if body.problem_id not in problems:
            raise HTTPException(status_code=404, detail="unknown problem")
        session = store.create(body.problem_id)
        with store.lock(session.id):
            record = run_round(session, body.code)
        return {"session_id": session.id, "solved": session.solved, **record}

    @app.post("/api/sessions/{session_id}/submit")
    def submit(session_id: str, body: SubmitBody, request: Request):
        check_auth(request)
        session = store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        with store.lock(session_id):
            record = run_round(session, body.code)
        return {"session_id": session.id, "solved": session.solved, **record}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str, request: Request):
        check_auth(request)
        session = store.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session.to_dict()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
