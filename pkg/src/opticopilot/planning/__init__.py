"""Deployment planning: PDDL-subset domain/problem handling, cost-optimal
forward search, and an independent plan validator."""

from functools import lru_cache
from importlib import resources

from opticopilot.planning.pddl import (
    BUDGET_FLUENT,
    COST_FLUENT,
    NO_BUDGET_SENTINEL,
    ActionSchema,
    PlanningDomain,
    PlanningProblem,
    PredicateSchema,
    parse_domain,
    parse_problem,
    render_problem,
    validate_problem,
)
from opticopilot.planning.plan import DeploymentPlan, PlanStep
from opticopilot.planning.problems import generate_problem
from opticopilot.planning.solver import DEFAULT_GROUNDING_CAP, ground_actions, solve
from opticopilot.planning.validator import ValidationReport, validate_plan

__all__ = [
    "ActionSchema",
    "BUDGET_FLUENT",
    "COST_FLUENT",
    "DEFAULT_GROUNDING_CAP",
    "DeploymentPlan",
    "NO_BUDGET_SENTINEL",
    "PlanStep",
    "PlanningDomain",
    "PlanningProblem",
    "PredicateSchema",
    "ValidationReport",
    "default_domain",
    "generate_problem",
    "ground_actions",
    "load_domain",
    "parse_domain",
    "parse_problem",
    "render_problem",
    "solve",
    "validate_plan",
    "validate_problem",
]


def load_domain(text: str) -> PlanningDomain:
    """Parse and validate a domain description in the supported subset."""
    return parse_domain(text)


@lru_cache(maxsize=1)
def default_domain() -> PlanningDomain:
    """The shipped optical deployment domain (12 predicates, 8 actions)."""
    path = resources.files("opticopilot").joinpath("data", "optical_domain.pddl")
    return parse_domain(path.read_text(encoding="utf-8"))
