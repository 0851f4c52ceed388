"""FastAPI service wrapping the pipeline.

Sessions are processed synchronously per request and persisted to the
event store, so state survives restarts and polling clients always see a
consistent history. Distinct sessions are fully concurrent; each session is
serialized by its own lock.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from opticopilot.config import AppConfig, build_runtime
from opticopilot.errors import StateConflictError
from opticopilot.pipeline import Pipeline, PipelineRuntime, Session, SessionState, replay_session
from opticopilot.service.schemas import (
    ClarifyRequest,
    HealthResponse,
    HistoryEventModel,
    IntentSubmission,
    SessionCreated,
    SessionSummary,
)
from opticopilot.store import SessionStore


class SessionManager:
    def __init__(self, pipeline: Pipeline, store: SessionStore):
        self.pipeline = pipeline
        self.store = store
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def _lock_for(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def create(self, text: str) -> Session:
        session = self.pipeline.new_session()
        with self._registry_lock:
            self._sessions[session.id] = session
        with self._lock_for(session.id):
            self.pipeline.submit_intent(session, text)
        return session

    def get(self, session_id: str) -> Session:
        session = self._sessions.get(session_id)
        if session is None:
            session = replay_session(self.store, session_id)
            if session is None:
                raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
            with self._registry_lock:
                self._sessions.setdefault(session_id, session)
        return self._sessions[session_id]

    def clarify(self, session_id: str, text: str) -> Session:
        session = self.get(session_id)
        with self._lock_for(session_id):
            try:
                self.pipeline.clarify(session, text)
            except StateConflictError as exc:
                raise HTTPException(status_code=409, detail=str(exc)) from exc
        return session

    def count(self) -> int:
        return len(set(self._sessions) | set(self.store.session_ids()))


def _summary(session: Session) -> SessionSummary:
    return SessionSummary(
        session_id=session.id,
        state=session.state.value,
        retry_count=session.retry_count,
        clarification_hint=session.clarification_hint,
        history=[HistoryEventModel(**event.to_json_dict()) for event in session.history],
    )


def create_app(
    config: Optional[AppConfig] = None,
    runtime: Optional[PipelineRuntime] = None,
    store: Optional[SessionStore] = None,
) -> FastAPI:
    config = config or AppConfig()
    runtime = runtime or build_runtime(config)
    store = store or SessionStore(config.sessions_dir)
    pipeline = Pipeline(runtime, store=store)
    manager = SessionManager(pipeline, store)

    app = FastAPI(
        title="opticopilot",
        description="Intent-to-design pipeline for optical networks",
        version="0.1.0",
    )
    app.state.manager = manager

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", sessions=manager.count())

    @app.post("/intents", response_model=SessionCreated, status_code=201)
    def submit_intent(body: IntentSubmission):
        session = manager.create(body.text)
        return SessionCreated(session_id=session.id, state=session.state.value)

    @app.get("/sessions/{session_id}", response_model=SessionSummary)
    def get_session(session_id: str):
        return _summary(manager.get(session_id))

    @app.post("/sessions/{session_id}/clarify", response_model=SessionSummary)
    def clarify(session_id: str, body: ClarifyRequest):
        return _summary(manager.clarify(session_id, body.text))

    def _artifact(session_id: str, key: str, label: str) -> JSONResponse:
        session = manager.get(session_id)
        payload = session.artifact_json(key)
        if payload is None:
            raise HTTPException(
                status_code=404,
                detail=f"session {session_id} has no {label} yet "
                f"(state {session.state.value})",
            )
        return JSONResponse(payload)

    @app.get("/sessions/{session_id}/intent")
    def get_intent(session_id: str):
        # Enriched form (structured intent + guidance) once stage 2 has run.
        session = manager.get(session_id)
        if session.artifact_json("enriched") is not None:
            return _artifact(session_id, "enriched", "intent")
        return _artifact(session_id, "intent", "parsed intent")

    @app.get("/sessions/{session_id}/plan")
    def get_plan(session_id: str):
        return _artifact(session_id, "plan", "deployment plan")

    @app.get("/sessions/{session_id}/design")
    def get_design(session_id: str):
        session = manager.get(session_id)
        payload = session.artifact_json("design") or session.artifact_json("degraded")
        if payload is None:
            raise HTTPException(
                status_code=404,
                detail=f"session {session_id} has no design yet "
                f"(state {session.state.value})",
            )
        return JSONResponse(payload)

    ui_dir = Path(__file__).resolve().parents[3] / "frontend" / "dist"
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
