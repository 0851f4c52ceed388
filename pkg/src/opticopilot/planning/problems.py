"""Deterministic problem generation from enriched intents.

A redundancy constraint is relaxed to pairwise connectivity by default (one
fiber per pair, no pair-connected goals); strict mode materializes parallel
fiber objects per pair and adds pair-connected goals, which the domain only
grants through configure-protection over two distinct active fibers.
"""

from __future__ import annotations

from itertools import combinations
from typing import Optional, Union

from opticopilot.grammar import StructuredIntent
from opticopilot.planning.pddl import (
    BUDGET_FLUENT,
    NO_BUDGET_SENTINEL,
    GroundLiteral,
    PlanningDomain,
    PlanningProblem,
    validate_problem,
)
from opticopilot.retrieval import EnrichedIntent


def fiber_name(site_a: str, site_b: str, index: int = 1) -> str:
    base = f"F-{site_a}-{site_b}"
    return base if index == 1 else f"{base}-P{index}"


def generate_problem(
    intent: Union[EnrichedIntent, StructuredIntent],
    domain: Optional[PlanningDomain] = None,
    latency_verified: bool = True,
    strict_redundancy: bool = False,
    name: Optional[str] = None,
) -> PlanningProblem:
    """Build the planning instance for an intent.

    One site object per site, one ROADM unit per site, one fiber object per
    unordered site pair (plus parallels in strict mode). ``latency_verified``
    records the physics pre-check outcome: when True the latency goal is
    seeded as an initial fact; when False the goal is left open and the plan
    must schedule an explicit verification step.
    """
    base = intent.base if isinstance(intent, EnrichedIntent) else intent
    if len(base.sites) < 2:
        raise ValueError("problem generation requires at least two sites")

    sites = [s.name for s in base.sites]
    constraints = base.constraints

    objects: list[tuple[str, str]] = [(s, "site") for s in sites]
    objects += [(f"R-{s}", "roadm") for s in sites]

    pairs = list(combinations(sites, 2))
    fibers_per_pair = 1
    if strict_redundancy and constraints.disjoint_paths and constraints.disjoint_paths >= 2:
        fibers_per_pair = constraints.disjoint_paths
    fibers: list[tuple[str, str, str]] = []
    for a, b in pairs:
        for k in range(1, fibers_per_pair + 1):
            fibers.append((fiber_name(a, b, k), a, b))
    objects += [(f, "fiber") for f, _, _ in fibers]

    init: set[GroundLiteral] = {("site-exists", (s,)) for s in sites}
    for f, a, b in fibers:
        init.add(("fiber-endpoint", (f, a)))
        init.add(("fiber-endpoint", (f, b)))

    goals: set[GroundLiteral] = {("site-operational", (s,)) for s in sites}
    goals |= {("fiber-active", (f,)) for f, _, _ in fibers}
    goals.add(("deployment-complete", ()))

    if constraints.latency_ms is not None:
        goals.add(("latency-satisfied", ()))
        if latency_verified:
            init.add(("latency-satisfied", ()))

    if strict_redundancy and fibers_per_pair >= 2:
        for a, b in pairs:
            goals.add(("pair-connected", (a, b)))

    budget = NO_BUDGET_SENTINEL
    if constraints.budget_usd is not None:
        budget = constraints.budget_usd
        init.add(("within-budget", ()))
        goals.add(("within-budget", ()))

    problem = PlanningProblem(
        name=name or f"optical-deploy-{len(sites)}site",
        domain_name="optical-deployment",
        objects=tuple(objects),
        init=frozenset(init),
        goals=frozenset(goals),
        budget_limit=budget,
    )
    if domain is not None:
        validate_problem(domain, problem)
    return problem
