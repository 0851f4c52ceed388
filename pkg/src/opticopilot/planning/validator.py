"""Independent plan checker.

Simulates a plan literal-by-literal from the initial state with no code
shared with the solver's search, so the two sides serve as oracles for each
other: preconditions and numeric guards must hold at application time,
recorded cumulative costs must match recomputation exactly, and the final
state must cover the goals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from opticopilot.planning.pddl import PlanningDomain, PlanningProblem
from opticopilot.planning.plan import DeploymentPlan


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failed_step: Optional[int] = None  # 1-based
    reason: Optional[str] = None
    recomputed_total: int = 0

    def describe(self) -> str:
        if self.valid:
            return f"plan valid; recomputed total ${self.recomputed_total:,}"
        return f"plan invalid at step {self.failed_step}: {self.reason}"


def validate_plan(
    domain: PlanningDomain,
    problem: PlanningProblem,
    plan: DeploymentPlan,
) -> ValidationReport:
    if not plan.feasible:
        raise ValueError("validate_plan requires a feasible plan")

    obj_types = dict(problem.objects)
    state = set(problem.init)
    cumulative = 0

    for number, step in enumerate(plan.steps, start=1):
        schema = domain.action(step.action)
        if schema is None:
            return ValidationReport(False, number, f"unknown action {step.action!r}")
        if len(step.args) != len(schema.parameters):
            return ValidationReport(
                False, number,
                f"action {step.action} takes {len(schema.parameters)} arguments, "
                f"got {len(step.args)}",
            )
        binding: dict[str, str] = {}
        for (var, type_name), arg in zip(schema.parameters, step.args):
            actual = obj_types.get(arg)
            if actual is None:
                return ValidationReport(False, number, f"unknown object {arg!r}")
            if actual != type_name:
                return ValidationReport(
                    False, number,
                    f"argument {arg!r} is a {actual}, parameter {var} expects {type_name}",
                )
            binding[var] = arg
        for a, b in schema.inequalities:
            if binding[a] == binding[b]:
                return ValidationReport(
                    False, number,
                    f"arguments {a} and {b} must be distinct, both are {binding[a]!r}",
                )
        for pred, args in schema.preconditions:
            literal = (pred, tuple(binding[a] for a in args))
            if literal not in state:
                rendered = "(" + " ".join((literal[0], *literal[1])) + ")"
                return ValidationReport(
                    False, number,
                    f"precondition {rendered} does not hold when step {number} applies",
                )
        if schema.has_guard and cumulative + schema.cost > problem.budget_limit:
            return ValidationReport(
                False, number,
                f"numeric guard fails: ${cumulative + schema.cost:,} exceeds the "
                f"budget limit ${problem.budget_limit:,}",
            )
        for pred, args in schema.deletes:
            state.discard((pred, tuple(binding[a] for a in args)))
        for pred, args in schema.adds:
            state.add((pred, tuple(binding[a] for a in args)))
        cumulative += schema.cost
        if step.cumulative_cost != cumulative:
            return ValidationReport(
                False, number,
                f"cumulative cost mismatch: plan records ${step.cumulative_cost:,}, "
                f"recomputation gives ${cumulative:,}",
            )

    for goal in sorted(problem.goals):
        if goal not in state:
            rendered = "(" + " ".join((goal[0], *goal[1])) + ")"
            return ValidationReport(
                False, len(plan.steps) or None,
                f"goal {rendered} not satisfied by the final state",
            )
    if plan.total_cost != cumulative:
        return ValidationReport(
            False, len(plan.steps) or None,
            f"declared total ${plan.total_cost:,} differs from recomputed ${cumulative:,}",
        )
    return ValidationReport(True, recomputed_total=cumulative)
