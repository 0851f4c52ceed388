"""Deployment plan data model and renderers."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional


@dataclass(frozen=True)
class PlanStep:
    action: str
    args: tuple[str, ...]
    cumulative_cost: int

    def render(self) -> str:
        return "(" + " ".join((self.action, *self.args)) + ")"


@dataclass(frozen=True)
class DeploymentPlan:
    steps: tuple[PlanStep, ...]
    total_cost: int
    feasible: bool
    infeasibility_reason: Optional[str] = None
    min_required_cost: Optional[int] = None
    validated: bool = False

    def mark_validated(self) -> "DeploymentPlan":
        return replace(self, validated=True)

    def to_json_dict(self) -> dict:
        out: dict = {
            "steps": [
                {
                    "action": s.action,
                    "args": list(s.args),
                    "cumulative_cost": s.cumulative_cost,
                }
                for s in self.steps
            ],
            "total_cost": self.total_cost,
            "feasible": self.feasible,
            "infeasibility_reason": self.infeasibility_reason,
            "validated": self.validated,
        }
        if self.min_required_cost is not None:
            out["min_required_cost"] = self.min_required_cost
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "DeploymentPlan":
        return cls(
            steps=tuple(
                PlanStep(s["action"], tuple(s["args"]), s["cumulative_cost"])
                for s in data.get("steps", [])
            ),
            total_cost=data["total_cost"],
            feasible=data["feasible"],
            infeasibility_reason=data.get("infeasibility_reason"),
            min_required_cost=data.get("min_required_cost"),
            validated=data.get("validated", False),
        )

    def render_text(self) -> str:
        if not self.feasible:
            return f"INFEASIBLE: {self.infeasibility_reason}"
        lines = [
            f"{i}: {step.render()} ; cumulative=${step.cumulative_cost}"
            for i, step in enumerate(self.steps, start=1)
        ]
        lines.append(f"total: ${self.total_cost}")
        return "\n".join(lines)
