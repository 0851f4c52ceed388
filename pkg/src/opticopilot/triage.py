"""Error routing for the retry loop, and corpus evaluation metrics.

Routing is a fixed table over GrammarError kinds: formatting defects go back
to the model with a correction hint, semantic gaps go to the user. Hint
wording lives in a data file so prompt changes never touch code.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from typing import Optional, Sequence

from opticopilot.grammar import GrammarError, GrammarErrorKind

MAX_LLM_RETRIES = 3


class TriageRoute(Enum):
    LLM_FIXABLE = "LlmFixable"
    USER_REQUIRED = "UserRequired"


# SyntaxMalformation covers token/ordering defects a re-prompt can repair;
# the four named kinds are semantic choices only the user can make.
_ROUTE_BY_KIND = {
    GrammarErrorKind.SYNTAX_MALFORMATION: TriageRoute.LLM_FIXABLE,
    GrammarErrorKind.MISSING_SITES: TriageRoute.USER_REQUIRED,
    GrammarErrorKind.VAGUE_VALUE: TriageRoute.USER_REQUIRED,
    GrammarErrorKind.INVALID_ROLE: TriageRoute.USER_REQUIRED,
    GrammarErrorKind.INVALID_COMPLIANCE: TriageRoute.USER_REQUIRED,
}


@dataclass(frozen=True)
class TriageDecision:
    route: TriageRoute
    hint: str
    source_error: GrammarError

    def to_json_dict(self) -> dict:
        return {
            "route": self.route.value,
            "hint": self.hint,
            "source_error": self.source_error.to_json_dict(),
        }


@lru_cache(maxsize=1)
def _templates() -> dict:
    path = resources.files("opticopilot").joinpath("data", "hint_templates.json")
    return json.loads(path.read_text(encoding="utf-8"))


def _default_standards() -> Sequence[str]:
    from opticopilot import retrieval

    return retrieval.default_corpus().allowlist_standards()


def triage(error: GrammarError, standards: Optional[Sequence[str]] = None) -> TriageDecision:
    """Route a grammar error and produce its correction/clarification hint."""
    route = _ROUTE_BY_KIND[error.kind]
    template = _templates()[error.kind.value]
    if error.kind is GrammarErrorKind.INVALID_COMPLIANCE:
        if standards is None:
            standards = _default_standards()
        listing = ", ".join(list(standards)[:5])
        hint = template.format(token=error.offending_token, standards=listing)
    else:
        hint = template.format(token=error.offending_token, message=error.message)
    return TriageDecision(route=route, hint=hint, source_error=error)


def escalation_hint(error: GrammarError, attempts: int) -> str:
    """Hint used when LLM-fixable retries are exhausted and the user takes over."""
    return _templates()["Escalation"].format(attempts=attempts, message=error.message)


# ---------------------------------------------------------------------------
# Evaluation metrics
# ---------------------------------------------------------------------------

VALID = "valid"


@dataclass(frozen=True)
class CaseResult:
    """One evaluated case: what was planted vs. what the parser reported.

    ``expected`` is "valid" or a GrammarError kind name; ``observed``
    likewise. ``elapsed_ms`` is the stage-1 wall-clock for the case.
    """

    expected: str
    observed: str
    elapsed_ms: float = 0.0

    @property
    def expected_valid(self) -> bool:
        return self.expected == VALID or self.expected.startswith(VALID + ":")


@dataclass(frozen=True)
class TypeStats:
    kind: str
    tests: int
    detected: int
    correct: int

    @property
    def accuracy_pct(self) -> float:
        if self.tests == 0:
            return 100.0
        return round(100.0 * self.correct / self.tests, 1)


@dataclass(frozen=True)
class MetricsReport:
    valid_total: int
    valid_passed: int
    invalid_total: int
    invalid_detected: int
    detected_correct: int
    mean_processing_ms: float
    per_type: tuple[TypeStats, ...] = field(default_factory=tuple)

    @property
    def pass_through_rate(self) -> float:
        if self.valid_total == 0:
            return 100.0
        return round(100.0 * self.valid_passed / self.valid_total, 1)

    @property
    def detection_rate(self) -> float:
        if self.invalid_total == 0:
            return 100.0
        return round(100.0 * self.invalid_detected / self.invalid_total, 1)

    @property
    def classification_accuracy(self) -> float:
        if self.invalid_detected == 0:
            return 100.0
        return round(100.0 * self.detected_correct / self.invalid_detected, 1)

    def to_json_dict(self) -> dict:
        return {
            "overall": {
                "valid_intent_pass_through_rate_pct": self.pass_through_rate,
                "error_detection_rate_pct": self.detection_rate,
                "error_classification_accuracy_pct": self.classification_accuracy,
                "average_processing_time_ms": round(self.mean_processing_ms, 1),
                "valid_total": self.valid_total,
                "valid_passed": self.valid_passed,
                "invalid_total": self.invalid_total,
                "invalid_detected": self.invalid_detected,
                "detected_correct": self.detected_correct,
            },
            "per_error_type": [
                {
                    "error_type": t.kind,
                    "tests": t.tests,
                    "detected": t.detected,
                    "correct": t.correct,
                    "accuracy_pct": t.accuracy_pct,
                }
                for t in self.per_type
            ],
        }

    def render_text(self) -> str:
        lines = [
            "Parsing Performance",
            "-------------------",
            f"Valid Intent Pass-Through Rate   {self.pass_through_rate:>6.1f}%"
            f"   ({self.valid_passed}/{self.valid_total})",
            f"Error Detection Rate             {self.detection_rate:>6.1f}%"
            f"   ({self.invalid_detected}/{self.invalid_total})",
            f"Error Classification Accuracy    {self.classification_accuracy:>6.1f}%"
            f"   ({self.detected_correct}/{self.invalid_detected})",
            f"Average Processing Time          {self.mean_processing_ms:>6.1f}ms",
        ]
        if self.per_type:
            lines += [
                "",
                "Error Type           Tests  Detected  Correct   Acc.%",
                "-----------------------------------------------------",
            ]
            for t in self.per_type:
                lines.append(
                    f"{t.kind:<20} {t.tests:>5} {t.detected:>9} {t.correct:>8} "
                    f"{t.accuracy_pct:>6.1f}%"
                )
        return "\n".join(lines)


def classification_metrics(results: Sequence[CaseResult]) -> MetricsReport:
    """Aggregate per-case outcomes into pass-through/detection/accuracy rates."""
    if not results:
        raise ValueError("classification_metrics requires at least one result")

    valid = [r for r in results if r.expected_valid]
    invalid = [r for r in results if not r.expected_valid]
    valid_passed = sum(1 for r in valid if r.observed == VALID)
    detected = [r for r in invalid if r.observed != VALID]
    correct = sum(1 for r in detected if r.observed == r.expected)

    kinds: list[str] = []
    for r in invalid:
        if r.expected not in kinds:
            kinds.append(r.expected)
    per_type = []
    for kind in kinds:
        cases = [r for r in invalid if r.expected == kind]
        kind_detected = [r for r in cases if r.observed != VALID]
        per_type.append(TypeStats(
            kind=kind,
            tests=len(cases),
            detected=len(kind_detected),
            correct=sum(1 for r in kind_detected if r.observed == kind),
        ))

    mean_ms = sum(r.elapsed_ms for r in results) / len(results)
    return MetricsReport(
        valid_total=len(valid),
        valid_passed=valid_passed,
        invalid_total=len(invalid),
        invalid_detected=len(detected),
        detected_correct=correct,
        mean_processing_ms=mean_ms,
        per_type=tuple(per_type),
    )
