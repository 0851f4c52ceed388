"""Session state machine driving the three-stage flow.

submit_intent runs rephrase -> parse -> triage, auto-retrying LLM-fixable
defects with a correction hint (bounded) and parking user-required defects
in AwaitingClarification. Parsed intents auto-advance through enrichment,
feasibility, planning and translation unless step mode is on. Every stage
appends a durable history event with a payload digest and wall-clock
duration.
"""

from __future__ import annotations

import hashlib
import json
import time
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

from opticopilot.errors import (
    MockRuleMissError,
    ResourceLimitError,
    StateConflictError,
    TransportError,
)
from opticopilot.feasibility import SiteRegistry, check_latency
from opticopilot.gateway import (
    MAX_REPHRASE_ATTEMPTS,
    GatewayConfig,
    RephraseRequest,
    rephrase,
)
from opticopilot.grammar import GrammarError, StructuredIntent, grammar_text, parse_intent
from opticopilot.planning import (
    DEFAULT_GROUNDING_CAP,
    DeploymentPlan,
    PlanningDomain,
    generate_problem,
    render_problem,
    solve,
    validate_plan,
)
from opticopilot.retrieval import Corpus, EnrichedIntent
from opticopilot.store import SessionStore
from opticopilot.synthesis import PriceEntry, degrade, translate
from opticopilot.triage import TriageRoute, escalation_hint, triage


class SessionState(Enum):
    AWAITING_INTENT = "AwaitingIntent"
    REPHRASING = "Rephrasing"
    PARSED = "Parsed"
    AWAITING_CLARIFICATION = "AwaitingClarification"
    ENRICHED = "Enriched"
    PLANNING = "Planning"
    PLAN_READY = "PlanReady"
    TRANSLATING = "Translating"
    DESIGN_READY = "DesignReady"
    DEGRADED = "Degraded"
    FAILED = "Failed"


TERMINAL_STATES = {SessionState.DESIGN_READY, SessionState.DEGRADED, SessionState.FAILED}

# The declared transition relation; _enter_state refuses anything outside it.
_TRANSITIONS: dict[SessionState, set[SessionState]] = {
    SessionState.AWAITING_INTENT: {SessionState.REPHRASING, SessionState.FAILED},
    SessionState.REPHRASING: {
        SessionState.REPHRASING,  # LLM-fixable retry
        SessionState.PARSED,
        SessionState.AWAITING_CLARIFICATION,
        SessionState.FAILED,
    },
    SessionState.PARSED: {SessionState.ENRICHED, SessionState.FAILED},
    SessionState.AWAITING_CLARIFICATION: {SessionState.REPHRASING, SessionState.FAILED},
    SessionState.ENRICHED: {SessionState.PLANNING, SessionState.FAILED},
    SessionState.PLANNING: {
        SessionState.PLAN_READY,
        SessionState.DEGRADED,
        SessionState.FAILED,
    },
    SessionState.PLAN_READY: {SessionState.TRANSLATING, SessionState.FAILED},
    SessionState.TRANSLATING: {SessionState.DESIGN_READY, SessionState.FAILED},
    SessionState.DESIGN_READY: set(),
    SessionState.DEGRADED: set(),
    SessionState.FAILED: set(),
}


@dataclass(frozen=True)
class HistoryEvent:
    stage: str
    state: str
    timestamp: float
    payload_digest: str
    duration_ms: float

    def to_json_dict(self) -> dict:
        return {
            "stage": self.stage,
            "state": self.state,
            "timestamp": self.timestamp,
            "payload_digest": self.payload_digest,
            "duration_ms": self.duration_ms,
        }


@dataclass
class Session:
    id: str
    state: SessionState = SessionState.AWAITING_INTENT
    history: list[HistoryEvent] = field(default_factory=list)
    artifacts: dict[str, Any] = field(default_factory=dict)
    retry_count: int = 0
    clarification_hint: Optional[str] = None
    user_text: Optional[str] = None

    def artifact_json(self, key: str) -> Optional[dict]:
        value = self.artifacts.get(key)
        if value is None:
            return None
        if isinstance(value, dict):
            return value
        to_json = getattr(value, "to_json_dict", None)
        return to_json() if to_json else None


@dataclass(frozen=True)
class PipelineRuntime:
    """Loaded resources the pipeline stages draw on."""

    domain: PlanningDomain
    corpus: Corpus
    registry: SiteRegistry
    gateway: GatewayConfig
    price_table: dict[str, PriceEntry]
    durations: dict[str, float]
    grounding_cap: int = DEFAULT_GROUNDING_CAP
    strict_redundancy: bool = False
    top_k: int = 5
    step_mode: bool = False


def _digest(payload: Any) -> str:
    try:
        blob = json.dumps(payload, sort_keys=True, default=str)
    except TypeError:
        blob = repr(payload)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


class Pipeline:
    def __init__(self, runtime: PipelineRuntime, store: Optional[SessionStore] = None):
        self.runtime = runtime
        self.store = store
        self._allowlist = tuple(runtime.corpus.allowlist_standards())

    # -- session lifecycle ---------------------------------------------------

    def new_session(self) -> Session:
        session = Session(id=uuid.uuid4().hex[:12])
        self._record(session, "session-created", session.state, payload=None, started=time.perf_counter())
        return session

    def submit_intent(self, session: Session, user_text: str) -> Session:
        if session.state not in (SessionState.AWAITING_INTENT, SessionState.AWAITING_CLARIFICATION):
            raise StateConflictError(
                f"submit_intent not allowed in state {session.state.value}"
            )
        session.user_text = user_text
        session.retry_count = 0
        session.clarification_hint = None
        try:
            parsed = self._stage1(session, user_text)
        except (TransportError, MockRuleMissError) as exc:
            self._fail(session, "rephrase", exc)
            return session
        if parsed is None:
            return session  # parked in AwaitingClarification
        if not self.runtime.step_mode:
            self.advance(session)
        return session

    def clarify(self, session: Session, clarification: str) -> Session:
        if session.state is not SessionState.AWAITING_CLARIFICATION:
            raise StateConflictError(
                f"clarify not allowed in state {session.state.value}"
            )
        combined = f"{session.user_text} {clarification}".strip()
        return self.submit_intent(session, combined)

    # -- stage 1: rephrase / parse / triage -----------------------------------

    def _stage1(self, session: Session, user_text: str) -> Optional[StructuredIntent]:
        attempt = 0
        hint: Optional[str] = None
        while True:
            started = time.perf_counter()
            request = RephraseRequest(
                user_text=user_text,
                grammar=grammar_text(),
                correction_hint=hint,
                attempt=attempt,
            )
            sentence = rephrase(request, self.runtime.gateway)
            self._record(
                session, "rephrase", SessionState.REPHRASING,
                payload={"attempt": attempt, "sentence": sentence.raw_text},
                started=started,
            )

            started = time.perf_counter()
            outcome = parse_intent(sentence, allowlist=self._allowlist)
            if isinstance(outcome, StructuredIntent):
                session.artifacts["sentence"] = sentence.raw_text
                session.artifacts["intent"] = outcome
                self._record(
                    session, "parse", SessionState.PARSED,
                    payload=outcome.to_json_dict(), started=started,
                )
                return outcome

            decision = triage(outcome, standards=self._allowlist)
            if decision.route is TriageRoute.LLM_FIXABLE and attempt < MAX_REPHRASE_ATTEMPTS:
                attempt += 1
                session.retry_count = attempt
                hint = decision.hint
                continue

            if decision.route is TriageRoute.LLM_FIXABLE:
                # Retries exhausted: escalate to the user with an apology.
                user_hint = escalation_hint(outcome, attempts=attempt)
            else:
                user_hint = decision.hint
            session.clarification_hint = user_hint
            session.artifacts["last_error"] = outcome
            session.artifacts["triage"] = decision
            self._record(
                session, "triage", SessionState.AWAITING_CLARIFICATION,
                payload={"error": outcome.to_json_dict(), "hint": user_hint},
                started=started,
            )
            return None

    # -- stages 2 and 3 --------------------------------------------------------

    def advance(self, session: Session) -> Session:
        """Run enrichment, feasibility+planning, and translation to a terminal
        state (or the next state in step mode)."""
        try:
            while session.state not in TERMINAL_STATES:
                before = session.state
                if session.state is SessionState.PARSED:
                    self._enrich(session)
                elif session.state is SessionState.ENRICHED:
                    self._plan(session)
                elif session.state is SessionState.PLAN_READY:
                    self._translate(session)
                elif session.state is SessionState.AWAITING_CLARIFICATION:
                    break
                else:
                    break
                if self.runtime.step_mode and session.state is not before:
                    break
        except (TransportError, MockRuleMissError, ResourceLimitError) as exc:
            self._fail(session, "advance", exc)
        return session

    def _enrich(self, session: Session) -> None:
        started = time.perf_counter()
        intent: StructuredIntent = session.artifacts["intent"]
        enriched = self.runtime.corpus.retrieve(intent, top_k=self.runtime.top_k)
        session.artifacts["enriched"] = enriched
        self._record(
            session, "enrich", SessionState.ENRICHED,
            payload=enriched.to_json_dict(), started=started,
        )

    def _plan(self, session: Session) -> None:
        started = time.perf_counter()
        self._record(session, "plan", SessionState.PLANNING, payload=None, started=started)
        enriched: EnrichedIntent = session.artifacts["enriched"]
        intent = enriched.base

        verdict = None
        latency_ok = True
        if intent.constraints.latency_ms is not None:
            verdict = check_latency(intent, self.runtime.registry)
            session.artifacts["feasibility"] = {
                "feasible": verdict.feasible,
                "narrative": verdict.narrative,
                "violations": [v.describe() for v in verdict.violations],
                "warnings": list(verdict.warnings),
            }
            latency_ok = verdict.feasible

        if not latency_ok:
            plan = DeploymentPlan(
                steps=(),
                total_cost=0,
                feasible=False,
                infeasibility_reason=(
                    "goal (latency-satisfied) is unsatisfiable: " + verdict.narrative
                ),
            )
        else:
            problem = generate_problem(
                enriched,
                domain=self.runtime.domain,
                latency_verified=True,
                strict_redundancy=self.runtime.strict_redundancy,
            )
            session.artifacts["problem"] = render_problem(problem)
            plan = solve(self.runtime.domain, problem, grounding_cap=self.runtime.grounding_cap)
            if plan.feasible:
                report = validate_plan(self.runtime.domain, problem, plan)
                if not report.valid:  # solver/validator disagreement is a defect
                    raise AssertionError(f"solver produced an invalid plan: {report.describe()}")
                plan = plan.mark_validated()

        session.artifacts["plan"] = plan
        if plan.feasible:
            self._record(
                session, "plan", SessionState.PLAN_READY,
                payload=plan.to_json_dict(), started=started,
            )
        else:
            degraded = degrade(enriched, plan.infeasibility_reason,
                               price_table=self.runtime.price_table)
            session.artifacts["degraded"] = degraded
            self._record(
                session, "plan", SessionState.DEGRADED,
                payload=degraded.to_json_dict(), started=started,
            )

    def _translate(self, session: Session) -> None:
        started = time.perf_counter()
        self._record(session, "translate", SessionState.TRANSLATING, payload=None, started=started)
        enriched: EnrichedIntent = session.artifacts["enriched"]
        plan: DeploymentPlan = session.artifacts["plan"]
        design = translate(
            plan, enriched,
            registry=self.runtime.registry,
            price_table=self.runtime.price_table,
            durations=self.runtime.durations,
        )
        session.artifacts["design"] = design
        self._record(
            session, "design", SessionState.DESIGN_READY,
            payload=design.to_json_dict(), started=started,
        )

    # -- bookkeeping -----------------------------------------------------------

    def _fail(self, session: Session, stage: str, exc: Exception) -> None:
        session.artifacts["failure"] = {"stage": stage, "cause": str(exc)}
        self._record(
            session, stage, SessionState.FAILED,
            payload={"cause": str(exc)}, started=time.perf_counter(),
        )

    def _enter_state(self, session: Session, new_state: SessionState) -> None:
        if new_state is session.state:
            return
        allowed = _TRANSITIONS[session.state]
        if new_state not in allowed:
            raise AssertionError(
                f"illegal transition {session.state.value} -> {new_state.value}"
            )
        session.state = new_state

    def _record(
        self,
        session: Session,
        stage: str,
        state: SessionState,
        payload: Any,
        started: float,
    ) -> None:
        self._enter_state(session, state)
        event = HistoryEvent(
            stage=stage,
            state=state.value,
            timestamp=time.time(),
            payload_digest=_digest(payload),
            duration_ms=round((time.perf_counter() - started) * 1000.0, 3),
        )
        session.history.append(event)
        if self.store is not None:
            record = event.to_json_dict()
            record["seq"] = len(session.history)
            record["session_id"] = session.id
            if session.user_text is not None:
                record["user_text"] = session.user_text
            if session.clarification_hint is not None:
                record["clarification_hint"] = session.clarification_hint
            record["payload"] = _jsonable(payload)
            self.store.append(session.id, record)


def _jsonable(payload: Any) -> Any:
    if payload is None or isinstance(payload, (str, int, float, bool)):
        return payload
    if isinstance(payload, dict):
        return payload
    to_json = getattr(payload, "to_json_dict", None)
    return to_json() if to_json else str(payload)


def replay_session(store: SessionStore, session_id: str) -> Optional[Session]:
    """Rebuild a session's externally visible state from its event log."""
    events = store.events(session_id)
    if not events:
        return None
    session = Session(id=session_id)
    stage_artifact_keys = {
        "parse": "intent",
        "enrich": "enriched",
        "plan": "plan",
        "design": "design",
    }
    for event in events:
        session.state = SessionState(event["state"])
        session.history.append(HistoryEvent(
            stage=event["stage"],
            state=event["state"],
            timestamp=event["timestamp"],
            payload_digest=event["payload_digest"],
            duration_ms=event["duration_ms"],
        ))
        if "user_text" in event:
            session.user_text = event["user_text"]
        session.clarification_hint = event.get("clarification_hint")
        payload = event.get("payload")
        if payload is None:
            continue
        key = stage_artifact_keys.get(event["stage"])
        if key:
            session.artifacts[key] = payload
        if event["stage"] == "plan" and event["state"] == SessionState.DEGRADED.value:
            session.artifacts["degraded"] = payload
            session.artifacts.pop("plan", None)
        if event["stage"] == "triage":
            session.artifacts["last_error"] = payload.get("error")
    return session
