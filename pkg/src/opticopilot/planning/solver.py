"""Cost-optimal forward search over the grounded state space.

Uniform-cost (Dijkstra) search with a deterministic tie-break: among
minimum-cost plans, prefer fewer steps, then the lexicographically least
sequence of grounded actions ordered by (schema declaration order, argument
tuple). Infeasibility results carry a proof sketch: an unreachable goal
literal (delete-free relaxation argument), state-space exhaustion, or a
budget lower bound from the true minimum plan cost.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Optional

from opticopilot.errors import ResourceLimitError
from opticopilot.planning.pddl import (
    ActionSchema,
    GroundLiteral,
    PlanningDomain,
    PlanningProblem,
)
from opticopilot.planning.plan import DeploymentPlan, PlanStep

DEFAULT_GROUNDING_CAP = 200_000
DEFAULT_EXPANSION_CAP = 1_000_000


@dataclass(frozen=True)
class GroundAction:
    index: int
    name: str
    args: tuple[str, ...]
    preconditions: frozenset[GroundLiteral]
    adds: frozenset[GroundLiteral]
    deletes: frozenset[GroundLiteral]
    cost: int
    has_guard: bool

    def render(self) -> str:
        return "(" + " ".join((self.name, *self.args)) + ")"


def _static_predicates(domain: PlanningDomain) -> set[str]:
    """Predicates no action ever adds or deletes; true iff true initially."""
    touched = set()
    for action in domain.actions:
        touched.update(lit[0] for lit in action.adds)
        touched.update(lit[0] for lit in action.deletes)
    return {p.name for p in domain.predicates} - touched


def ground_actions(
    domain: PlanningDomain,
    problem: PlanningProblem,
    cap: int = DEFAULT_GROUNDING_CAP,
) -> list[GroundAction]:
    """Instantiate action schemas over the problem objects.

    Bindings that violate a static precondition (a predicate no action
    touches, checked against the initial state) or an inequality constraint
    are pruned during enumeration, not after.
    """
    statics = _static_predicates(domain)
    static_init = {lit for lit in problem.init if lit[0] in statics}
    objects_by_type: dict[str, list[str]] = {}
    for name, type_name in problem.objects:
        objects_by_type.setdefault(type_name, []).append(name)
    for names in objects_by_type.values():
        names.sort()

    grounded: list[GroundAction] = []

    def bind(action: ActionSchema, position: int, binding: dict[str, str]) -> None:
        if len(grounded) > cap:
            raise ResourceLimitError(
                f"grounded action count exceeded the cap of {cap}; "
                "raise the planner grounding cap or shrink the instance"
            )
        if position == len(action.parameters):
            grounded.append(_instantiate(action, binding))
            return
        var, type_name = action.parameters[position]
        for obj in objects_by_type.get(type_name, []):
            binding[var] = obj
            if _binding_consistent(action, binding, static_init, statics):
                bind(action, position + 1, binding)
            del binding[var]

    def _binding_consistent(
        action: ActionSchema,
        binding: dict[str, str],
        static_init: set[GroundLiteral],
        statics: set[str],
    ) -> bool:
        for a, b in action.inequalities:
            if a in binding and b in binding and binding[a] == binding[b]:
                return False
        for pred, args in action.preconditions:
            if pred not in statics:
                continue
            if all(arg in binding for arg in args):
                ground = (pred, tuple(binding[arg] for arg in args))
                if ground not in static_init:
                    return False
        return True

    def _instantiate(action: ActionSchema, binding: dict[str, str]) -> GroundAction:
        def g(lits):
            return frozenset(
                (pred, tuple(binding[a] for a in args)) for pred, args in lits
            )

        return GroundAction(
            index=len(grounded),
            name=action.name,
            args=tuple(binding[var] for var, _ in action.parameters),
            preconditions=g(action.preconditions),
            adds=g(action.adds),
            deletes=g(action.deletes),
            cost=action.cost,
            has_guard=action.has_guard,
        )

    for action in domain.actions:
        bind(action, 0, {})
    return grounded


def relaxed_reachable(
    init: frozenset[GroundLiteral], actions: list[GroundAction]
) -> set[GroundLiteral]:
    """Delete-free reachability fixpoint (ignores costs and guards)."""
    reachable = set(init)
    pending = list(actions)
    changed = True
    while changed:
        changed = False
        remaining = []
        for action in pending:
            if action.preconditions <= reachable:
                before = len(reachable)
                reachable |= action.adds
                if len(reachable) != before:
                    changed = True
            else:
                remaining.append(action)
        pending = remaining
    return reachable


def solve(
    domain: PlanningDomain,
    problem: PlanningProblem,
    grounding_cap: int = DEFAULT_GROUNDING_CAP,
    expansion_cap: int = DEFAULT_EXPANSION_CAP,
) -> DeploymentPlan:
    """Minimum-cost plan reaching all goals, or an infeasibility certificate."""
    actions = ground_actions(domain, problem, cap=grounding_cap)

    # Unreachable-goal certificate: sound because real reachability is a
    # subset of delete-free reachability.
    reachable = relaxed_reachable(problem.init, actions)
    for goal in sorted(problem.goals):
        if goal not in reachable:
            rendered = "(" + " ".join((goal[0], *goal[1])) + ")"
            return DeploymentPlan(
                steps=(),
                total_cost=0,
                feasible=False,
                infeasibility_reason=(
                    f"goal literal {rendered} is unsatisfiable: no grounded action "
                    "can ever achieve it from the initial state"
                ),
            )

    # Uniform-cost search ignoring the budget guard. The cost fluent only
    # increases, so a minimum-cost plan whose total fits the budget also
    # satisfies every per-step guard; if even the minimum exceeds the budget,
    # that minimum is the shortfall certificate.
    best = _dijkstra(problem.init, frozenset(problem.goals), actions, expansion_cap)
    if best is None:
        return DeploymentPlan(
            steps=(),
            total_cost=0,
            feasible=False,
            infeasibility_reason=(
                "state-space exhaustion: every reachable state was explored and "
                "none satisfies all goals"
            ),
        )
    cost, seq = best
    if cost > problem.budget_limit:
        shortfall = cost - problem.budget_limit
        return DeploymentPlan(
            steps=(),
            total_cost=0,
            feasible=False,
            infeasibility_reason=(
                f"budget shortfall: the minimum required cost is ${cost:,}, which "
                f"exceeds the budget limit ${problem.budget_limit:,} by ${shortfall:,}"
            ),
            min_required_cost=cost,
        )

    steps = []
    cumulative = 0
    for idx in seq:
        action = actions[idx]
        cumulative += action.cost
        steps.append(PlanStep(action=action.name, args=action.args, cumulative_cost=cumulative))
    return DeploymentPlan(steps=tuple(steps), total_cost=cost, feasible=True)


class _Landmarks:
    """Literal landmarks of a delete-free task, by backward chaining.

    A goal literal is a landmark; so is any common precondition of all
    achievers of a landmark. ``children[L]`` holds those common
    preconditions, and ``uniform_classes[i]`` lists the landmark literals
    whose full achiever set contains action i with every member sharing the
    same add set and cost (so the members are interchangeable in any plan).
    """

    def __init__(self, actions: list[GroundAction], goals: frozenset[GroundLiteral]):
        adders: dict[GroundLiteral, list[GroundAction]] = {}
        for action in actions:
            for lit in action.adds:
                adders.setdefault(lit, []).append(action)
        self.children: dict[GroundLiteral, tuple[GroundLiteral, ...]] = {}
        self.uniform_classes: dict[int, list[GroundLiteral]] = {}
        self.goals = goals

        seen: set[GroundLiteral] = set()
        stack = list(goals)
        while stack:
            lit = stack.pop()
            if lit in seen:
                continue
            seen.add(lit)
            achievers = adders.get(lit)
            if not achievers:
                continue
            common = frozenset.intersection(*(a.preconditions for a in achievers))
            self.children[lit] = tuple(sorted(common))
            stack.extend(common)
            first = achievers[0]
            if all(
                a.adds == first.adds and a.cost == first.cost for a in achievers[1:]
            ):
                for a in achievers:
                    self.uniform_classes.setdefault(a.index, []).append(lit)

    def needed(self, state: frozenset) -> set[GroundLiteral]:
        """Landmark literals every completion from ``state`` must still add."""
        out: set[GroundLiteral] = set()
        stack = [g for g in self.goals if g not in state]
        while stack:
            lit = stack.pop()
            if lit in out:
                continue
            out.add(lit)
            for child in self.children.get(lit, ()):
                if child not in state:
                    stack.append(child)
        return out


def _dijkstra(
    init: frozenset[GroundLiteral],
    goals: frozenset[GroundLiteral],
    actions: list[GroundAction],
    expansion_cap: int = DEFAULT_EXPANSION_CAP,
) -> Optional[tuple[int, tuple[int, ...]]]:
    # Delete-free tasks are fully commutative (states only grow), which
    # licenses two prunings that provably preserve the minimum-cost,
    # minimum-length, lexicographically-least plan:
    #   1. landmark commitment: if the lowest-index applicable action sits in
    #      a uniform-add/uniform-cost achiever class of a landmark literal the
    #      completion still needs, every completion uses some member of that
    #      class, and moving an interchangeable member to the front is
    #      cost/length-neutral and lexicographically no larger, so only that
    #      action needs expanding;
    #   2. sleep-set ordering: after applying action L, a lower-index action
    #      whose preconditions L did not touch was already applicable before
    #      L, and the lexicographically least plan never schedules it later.
    delete_free = all(not action.deletes for action in actions)
    landmarks = _Landmarks(actions, goals) if delete_free else None
    counter = itertools.count()
    start = frozenset(init)
    heap: list[tuple[int, int, tuple[int, ...], int, frozenset]] = [
        (0, 0, (), next(counter), start)
    ]
    closed: set[frozenset] = set()
    while heap:
        cost, length, seq, _, state = heapq.heappop(heap)
        if state in closed:
            continue
        closed.add(state)
        if len(closed) > expansion_cap:
            raise ResourceLimitError(
                f"search expanded more than {expansion_cap} states; "
                "raise the expansion cap or shrink the instance"
            )
        if goals <= state:
            return cost, seq

        applicable = [
            a for a in actions
            if a.preconditions <= state and not (not a.deletes and a.adds <= state)
        ]
        if landmarks is not None and applicable:
            first = applicable[0]
            classes = landmarks.uniform_classes.get(first.index)
            if classes:
                still_needed = landmarks.needed(state)
                if any(lit in still_needed for lit in classes):
                    applicable = [first]

        last_adds: Optional[frozenset] = None
        last_index = -1
        if seq:
            last_index = seq[-1]
            last_adds = actions[last_index].adds
        for action in applicable:
            if (
                delete_free
                and len(applicable) > 1
                and last_adds is not None
                and action.index < last_index
                and not (action.preconditions & last_adds)
            ):
                continue
            successor = (state - action.deletes) | action.adds
            if successor == state or successor in closed:
                continue
            heapq.heappush(
                heap,
                (cost + action.cost, length + 1, seq + (action.index,), next(counter), successor),
            )
    return None
