"""Pydantic request/response models for the HTTP API."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class IntentSubmission(BaseModel):
    text: str = Field(..., min_length=1, description="Free-form intent text")


class ClarifyRequest(BaseModel):
    text: str = Field(..., min_length=1, description="Answer to the clarification question")


class SessionCreated(BaseModel):
    session_id: str
    state: str


class HistoryEventModel(BaseModel):
    stage: str
    state: str
    timestamp: float
    payload_digest: str
    duration_ms: float


class SessionSummary(BaseModel):
    session_id: str
    state: str
    retry_count: int
    clarification_hint: Optional[str] = None
    history: list[HistoryEventModel]


class HealthResponse(BaseModel):
    status: str
    sessions: int
