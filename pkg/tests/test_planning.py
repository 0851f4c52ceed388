"""Planning core: PDDL loading, solving, validation, and optimality oracles."""

import random
from itertools import product

import pytest

from opticopilot.errors import PddlError, ResourceLimitError
from opticopilot.grammar import ConstraintSet, SiteSpec, StructuredIntent
from opticopilot.planning import (
    NO_BUDGET_SENTINEL,
    DeploymentPlan,
    PlanStep,
    default_domain,
    generate_problem,
    load_domain,
    parse_problem,
    render_problem,
    solve,
    validate_plan,
)

CASE1_INTENT = StructuredIntent(
    sites=(
        SiteSpec("SITE1", role="core"),
        SiteSpec("SITE2", role="edge"),
        SiteSpec("SITE3", role="hub"),
    ),
    constraints=ConstraintSet(
        latency_ms=10,
        budget_usd=1500000,
        disjoint_paths=3,
        availability="high-availability",
    ),
)


def intent_of(n_sites, budget=None, latency=None, disjoint=None):
    sites = tuple(SiteSpec(f"S{i + 1}") for i in range(n_sites))
    return StructuredIntent(
        sites=sites,
        constraints=ConstraintSet(
            latency_ms=latency, budget_usd=budget, disjoint_paths=disjoint
        ),
    )


# ---------------------------------------------------------------------------
# Independent optimality oracle: naive grounding + distance-map Dijkstra,
# sharing no code with the solver.
# ---------------------------------------------------------------------------

def oracle_min_cost(domain, problem, max_len=None):
    objects = {}
    for name, t in problem.objects:
        objects.setdefault(t, []).append(name)

    grounded = []
    for schema in domain.actions:
        pools = [objects.get(t, []) for _, t in schema.parameters]
        for combo in product(*pools):
            binding = {var: obj for (var, _), obj in zip(schema.parameters, combo)}
            if any(binding[a] == binding[b] for a, b in schema.inequalities):
                continue
            pre = {(p, tuple(binding[a] for a in args)) for p, args in schema.preconditions}
            add = {(p, tuple(binding[a] for a in args)) for p, args in schema.adds}
            dele = {(p, tuple(binding[a] for a in args)) for p, args in schema.deletes}
            grounded.append((pre, add, dele, schema.cost))

    goals = set(problem.goals)
    start = frozenset(problem.init)
    dist = {start: 0}
    frontier = [start]
    best = None
    steps_to = {start: 0}
    while frontier:
        # smallest-distance-first expansion without a heap, fine at this scale
        state = min(frontier, key=lambda s: dist[s])
        frontier.remove(state)
        d = dist[state]
        if best is not None and d >= best:
            continue
        if goals <= state:
            best = d if best is None else min(best, d)
            continue
        if max_len is not None and steps_to[state] >= max_len:
            continue
        for pre, add, dele, cost in grounded:
            if pre <= state:
                nxt = frozenset((state - dele) | add)
                nd = d + cost
                if nxt not in dist or nd < dist[nxt]:
                    dist[nxt] = nd
                    steps_to[nxt] = steps_to[state] + 1
                    if nxt not in frontier:
                        frontier.append(nxt)
    return best


class TestDomainLoading:
    def test_shipped_domain_counts(self):
        domain = default_domain()
        assert len(domain.predicates) == 12
        assert len(domain.actions) == 8

    def test_shipped_domain_names(self):
        domain = default_domain()
        predicates = {p.name for p in domain.predicates}
        assert {"site-operational", "fiber-deployed", "within-budget"} <= predicates
        actions = {a.name for a in domain.actions}
        assert {"commission-site", "deploy-fiber"} <= actions

    def test_empty_action_domain_valid(self):
        domain = load_domain(
            "(define (domain bare) (:types thing)"
            " (:predicates (flag ?t - thing)))"
        )
        assert domain.actions == ()

    def test_undeclared_predicate_in_delete_rejected(self):
        text = (
            "(define (domain bad) (:types thing)"
            " (:predicates (flag ?t - thing))"
            " (:action wipe :parameters (?t - thing)"
            "  :precondition (and (flag ?t))"
            "  :effect (and (not (ghost ?t)))))"
        )
        with pytest.raises(PddlError, match="ghost"):
            load_domain(text)

    def test_overlapping_add_delete_rejected(self):
        text = (
            "(define (domain bad) (:types thing)"
            " (:predicates (flag ?t - thing))"
            " (:action flip :parameters (?t - thing)"
            "  :effect (and (flag ?t) (not (flag ?t)))))"
        )
        with pytest.raises(PddlError, match="overlap"):
            load_domain(text)

    def test_quantifiers_rejected(self):
        text = (
            "(define (domain bad) (:types thing)"
            " (:predicates (flag ?t - thing))"
            " (:action all :parameters ()"
            "  :precondition (forall (?t - thing) (flag ?t))"
            "  :effect (and)))"
        )
        with pytest.raises(PddlError, match="forall"):
            load_domain(text)

    def test_conditional_effects_rejected(self):
        text = (
            "(define (domain bad) (:types thing)"
            " (:predicates (flag ?t - thing) (other ?t - thing))"
            " (:action c :parameters (?t - thing)"
            "  :effect (when (flag ?t) (other ?t))))"
        )
        with pytest.raises(PddlError, match="when"):
            load_domain(text)

    def test_cost_without_guard_rejected(self):
        text = (
            "(define (domain bad) (:types thing)"
            " (:functions (total-cost) (budget-limit))"
            " (:predicates (flag ?t - thing))"
            " (:action buy :parameters (?t - thing)"
            "  :effect (and (flag ?t) (increase (total-cost) 5))))"
        )
        with pytest.raises(PddlError, match="guard"):
            load_domain(text)

    def test_durative_actions_rejected(self):
        with pytest.raises(PddlError):
            load_domain(
                "(define (domain bad) (:durative-action x))"
            )


class TestProblemGeneration:
    def test_case1_shape(self):
        problem = generate_problem(CASE1_INTENT, domain=default_domain())
        assert len(problem.objects_of_type("site")) == 3
        assert len(problem.objects_of_type("roadm")) == 3
        assert len(problem.objects_of_type("fiber")) == 3
        assert problem.budget_limit == 1500000
        assert ("latency-satisfied", ()) in problem.goals
        assert ("within-budget", ()) in problem.goals

    def test_minimal_two_site_goals(self):
        problem = generate_problem(intent_of(2), domain=default_domain())
        goal_preds = sorted(g[0] for g in problem.goals)
        assert goal_preds == [
            "deployment-complete", "fiber-active",
            "site-operational", "site-operational",
        ]
        assert problem.budget_limit == NO_BUDGET_SENTINEL

    def test_four_sites_complete_graph(self):
        problem = generate_problem(intent_of(4), domain=default_domain())
        assert len(problem.objects_of_type("fiber")) == 6

    def test_strict_redundancy_materializes_parallel_fibers(self):
        intent = intent_of(3, disjoint=3)
        problem = generate_problem(intent, domain=default_domain(), strict_redundancy=True)
        assert len(problem.objects_of_type("fiber")) == 9
        assert sum(1 for g in problem.goals if g[0] == "pair-connected") == 3

    def test_single_site_rejected(self):
        with pytest.raises(ValueError):
            generate_problem(intent_of(1))

    def test_problem_text_round_trip(self):
        domain = default_domain()
        problem = generate_problem(CASE1_INTENT, domain=domain)
        text = render_problem(problem)
        parsed = parse_problem(text, domain)
        assert parsed.init == problem.init
        assert parsed.goals == problem.goals
        assert parsed.budget_limit == problem.budget_limit
        assert set(parsed.objects) == set(problem.objects)


class TestSolve:
    def test_case1_sixteen_step_plan(self):
        domain = default_domain()
        problem = generate_problem(CASE1_INTENT, domain=domain)
        plan = solve(domain, problem)
        assert plan.feasible
        assert len(plan.steps) == 16
        names = [s.action for s in plan.steps]
        assert names[0:3] == ["commission-site"] * 3
        assert names[3:6] == ["install-roadm"] * 3
        assert names[6:9] == ["deploy-fiber"] * 3
        assert names[9:12] == ["activate-roadm"] * 3
        assert names[12:15] == ["activate-fiber"] * 3
        assert names[15] == "complete-deployment"
        assert plan.steps[5].cumulative_cost == 390000
        assert plan.steps[8].cumulative_cost == 765000
        assert plan.total_cost == 1400000

    def test_zero_budget_shortfall(self):
        domain = default_domain()
        intent = intent_of(2, budget=None)
        problem = generate_problem(intent, domain=domain)
        zero_budget = type(problem)(
            name=problem.name,
            domain_name=problem.domain_name,
            objects=problem.objects,
            init=problem.init,
            goals=problem.goals,
            budget_limit=0,
        )
        plan = solve(domain, zero_budget)
        assert not plan.feasible
        assert "shortfall" in plan.infeasibility_reason
        assert plan.min_required_cost == oracle_min_cost(domain, zero_budget)
        assert plan.steps == ()

    def test_unreachable_goal_certificate(self):
        domain = default_domain()
        problem = generate_problem(intent_of(2), domain=domain)
        impossible = type(problem)(
            name=problem.name,
            domain_name=problem.domain_name,
            objects=problem.objects,
            # no site-exists facts: commissioning can never start
            init=frozenset(l for l in problem.init if l[0] != "site-exists"),
            goals=problem.goals,
            budget_limit=problem.budget_limit,
        )
        plan = solve(domain, impossible)
        assert not plan.feasible
        assert "unsatisfiable" in plan.infeasibility_reason

    def test_budget_monotonicity(self):
        domain = default_domain()
        base = generate_problem(intent_of(2), domain=domain)
        minimum = oracle_min_cost(domain, base)
        for budget in (minimum, minimum + 1, minimum * 2):
            problem = type(base)(
                name=base.name, domain_name=base.domain_name, objects=base.objects,
                init=base.init | {("within-budget", ())},
                goals=base.goals, budget_limit=budget,
            )
            plan = solve(domain, problem)
            assert plan.feasible
            assert plan.total_cost == minimum
            assert all(s.cumulative_cost <= budget for s in plan.steps)

    def test_random_two_site_instances_match_bounded_bfs(self):
        domain = default_domain()
        rng = random.Random(31337)
        for _ in range(12):
            budget = rng.choice([None, 700000, 2000000])
            latency = rng.choice([None, 10])
            intent = intent_of(2, budget=budget, latency=latency)
            problem = generate_problem(intent, domain=domain)
            plan = solve(domain, problem)
            assert plan.feasible
            assert validate_plan(domain, problem, plan).valid
            # exhaustive search over plans of length <= 12
            assert plan.total_cost == oracle_min_cost(domain, problem, max_len=12)

    def test_grounding_cap(self):
        domain = default_domain()
        problem = generate_problem(intent_of(6), domain=domain)
        with pytest.raises(ResourceLimitError):
            solve(domain, problem, grounding_cap=10)

    def test_expansion_cap(self):
        domain = default_domain()
        problem = generate_problem(intent_of(4), domain=domain)
        with pytest.raises(ResourceLimitError):
            solve(domain, problem, expansion_cap=3)

    def test_desk_scale_ten_sites(self):
        import time

        domain = default_domain()
        problem = generate_problem(intent_of(10), domain=domain)
        started = time.perf_counter()
        plan = solve(domain, problem)
        elapsed = time.perf_counter() - started
        assert plan.feasible
        assert validate_plan(domain, problem, plan).valid
        # n sites: per-site 130k install + 70k activation; per-pair 125k
        # deploy + 125k activation; one 50k completion
        n, pairs = 10, 45
        assert plan.total_cost == n * 200000 + pairs * 250000 + 50000
        assert elapsed < 5.0

    def test_deterministic(self):
        domain = default_domain()
        problem = generate_problem(CASE1_INTENT, domain=domain)
        assert solve(domain, problem) == solve(domain, problem)

    def test_strict_redundancy_uses_configure_protection(self):
        domain = default_domain()
        intent = intent_of(2, disjoint=2)
        problem = generate_problem(intent, domain=domain, strict_redundancy=True)
        plan = solve(domain, problem)
        assert plan.feasible
        assert sum(1 for s in plan.steps if s.action == "configure-protection") == 1
        assert sum(1 for s in plan.steps if s.action == "deploy-fiber") == 2
        assert validate_plan(domain, problem, plan).valid


class TestValidatePlan:
    def test_case1_plan_validates(self):
        domain = default_domain()
        problem = generate_problem(CASE1_INTENT, domain=domain)
        plan = solve(domain, problem)
        report = validate_plan(domain, problem, plan)
        assert report.valid
        assert report.recomputed_total == 1400000

    def test_swapped_steps_fail_with_missing_precondition(self):
        domain = default_domain()
        problem = generate_problem(CASE1_INTENT, domain=domain)
        plan = solve(domain, problem)
        steps = list(plan.steps)
        steps[3], steps[6] = steps[6], steps[3]  # deploy-fiber before any install
        mutated = DeploymentPlan(
            steps=tuple(steps), total_cost=plan.total_cost, feasible=True
        )
        report = validate_plan(domain, problem, mutated)
        assert not report.valid
        assert report.failed_step == 4
        assert "roadm-installed" in report.reason

    def test_empty_plan_against_goal_free_problem(self):
        domain = default_domain()
        base = generate_problem(intent_of(2), domain=domain)
        goal_free = type(base)(
            name=base.name, domain_name=base.domain_name, objects=base.objects,
            init=base.init, goals=frozenset(), budget_limit=base.budget_limit,
        )
        plan = DeploymentPlan(steps=(), total_cost=0, feasible=True)
        report = validate_plan(domain, goal_free, plan)
        assert report.valid
        assert report.recomputed_total == 0

    def test_cost_mismatch_detected(self):
        domain = default_domain()
        problem = generate_problem(intent_of(2), domain=domain)
        plan = solve(domain, problem)
        steps = list(plan.steps)
        steps[-1] = PlanStep(steps[-1].action, steps[-1].args, steps[-1].cumulative_cost + 1)
        mutated = DeploymentPlan(steps=tuple(steps), total_cost=plan.total_cost, feasible=True)
        report = validate_plan(domain, problem, mutated)
        assert not report.valid
        assert "mismatch" in report.reason

    def test_infeasible_plan_rejected(self):
        domain = default_domain()
        problem = generate_problem(intent_of(2), domain=domain)
        with pytest.raises(ValueError):
            validate_plan(domain, problem, DeploymentPlan((), 0, False, "nope"))

    def test_guard_violation_detected(self):
        domain = default_domain()
        base = generate_problem(intent_of(2), domain=domain)
        plan = solve(domain, base)
        tight = type(base)(
            name=base.name, domain_name=base.domain_name, objects=base.objects,
            init=base.init, goals=base.goals, budget_limit=plan.total_cost - 1,
        )
        report = validate_plan(domain, tight, plan)
        assert not report.valid
        assert "guard" in report.reason


class TestPlanSerialization:
    def test_json_round_trip(self):
        domain = default_domain()
        problem = generate_problem(intent_of(2), domain=domain)
        plan = solve(domain, problem)
        assert DeploymentPlan.from_json_dict(plan.to_json_dict()) == plan

    def test_text_rendering_format(self):
        domain = default_domain()
        problem = generate_problem(intent_of(2), domain=domain)
        plan = solve(domain, problem)
        first = plan.render_text().splitlines()[0]
        assert first.startswith("1: (commission-site S1) ; cumulative=$0")

    def test_cumulative_costs_non_decreasing(self):
        domain = default_domain()
        problem = generate_problem(CASE1_INTENT, domain=domain)
        plan = solve(domain, problem)
        costs = [s.cumulative_cost for s in plan.steps]
        assert costs == sorted(costs)
        assert costs[-1] == plan.total_cost
