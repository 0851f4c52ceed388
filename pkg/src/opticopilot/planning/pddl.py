"""PDDL subset reader and writer.

Supported: typed STRIPS plus a single increasing numeric fluent and one
numeric guard form ``(<= (+ (total-cost) K) (budget-limit))``. Quantifiers,
conditional effects, disjunctions and durative actions are rejected at parse
time so everything that loads is also checkable by the plan validator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from opticopilot.errors import PddlError

COST_FLUENT = "total-cost"
BUDGET_FLUENT = "budget-limit"
# Effectively unconstrained budget for problems without a budget clause.
NO_BUDGET_SENTINEL = 2**53 - 1

_ALLOWED_REQUIREMENTS = {
    ":strips", ":typing", ":equality", ":action-costs", ":numeric-fluents",
}
_REJECTED_HEADS = {"forall", "exists", "when", "or", "imply", "oneof"}

GroundLiteral = tuple[str, tuple[str, ...]]
SchemaLiteral = tuple[str, tuple[str, ...]]


# ---------------------------------------------------------------------------
# S-expressions
# ---------------------------------------------------------------------------

def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    for line in text.splitlines():
        code = line.split(";", 1)[0]
        out.extend(code.replace("(", " ( ").replace(")", " ) ").split())
    return out


def _read_sexpr(tokens: list[str]) -> list:
    if not tokens:
        raise PddlError("empty PDDL text")
    pos = 0

    def read() -> Union[str, list]:
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        if tok == "(":
            items = []
            while pos < len(tokens) and tokens[pos] != ")":
                items.append(read())
            if pos >= len(tokens):
                raise PddlError("unbalanced parentheses")
            pos += 1
            return items
        if tok == ")":
            raise PddlError("unexpected ')'")
        return tok.lower() if tok.startswith((":", "?")) else tok

    expr = read()
    if pos != len(tokens):
        raise PddlError("trailing tokens after the top-level form")
    if not isinstance(expr, list):
        raise PddlError("top-level form must be a list")
    return expr


def _parse_typed_list(items: Sequence, what: str) -> list[tuple[str, str]]:
    """Parse ``a b - t c - u`` into [(a,t), (b,t), (c,u)]."""
    result: list[tuple[str, str]] = []
    pending: list[str] = []
    i = 0
    while i < len(items):
        tok = items[i]
        if not isinstance(tok, str):
            raise PddlError(f"unexpected nested list in {what}")
        if tok == "-":
            if i + 1 >= len(items) or not isinstance(items[i + 1], str):
                raise PddlError(f"missing type name after '-' in {what}")
            type_name = items[i + 1]
            if not pending:
                raise PddlError(f"type {type_name!r} with no names in {what}")
            result.extend((name, type_name) for name in pending)
            pending = []
            i += 2
        else:
            pending.append(tok)
            i += 1
    if pending:
        raise PddlError(f"names {pending} lack a '- type' annotation in {what}")
    return result


def _check_head(expr, what: str) -> None:
    if isinstance(expr, list) and expr and isinstance(expr[0], str):
        if expr[0].lower() in _REJECTED_HEADS:
            raise PddlError(f"unsupported PDDL feature {expr[0]!r} in {what}")


# ---------------------------------------------------------------------------
# Domain model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PredicateSchema:
    name: str
    param_types: tuple[str, ...]


@dataclass(frozen=True)
class ActionSchema:
    name: str
    parameters: tuple[tuple[str, str], ...]  # (?var, type)
    preconditions: tuple[SchemaLiteral, ...]
    inequalities: tuple[tuple[str, str], ...]  # pairs of vars required distinct
    adds: tuple[SchemaLiteral, ...]
    deletes: tuple[SchemaLiteral, ...]
    cost: int
    has_guard: bool


@dataclass(frozen=True)
class PlanningDomain:
    name: str
    types: tuple[str, ...]
    predicates: tuple[PredicateSchema, ...]
    actions: tuple[ActionSchema, ...]
    cost_fluent: str = COST_FLUENT

    def predicate(self, name: str) -> Optional[PredicateSchema]:
        for p in self.predicates:
            if p.name == name:
                return p
        return None

    def action(self, name: str) -> Optional[ActionSchema]:
        for a in self.actions:
            if a.name == name:
                return a
        return None


@dataclass(frozen=True)
class PlanningProblem:
    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]  # (name, type)
    init: frozenset[GroundLiteral]
    goals: frozenset[GroundLiteral]
    budget_limit: int = NO_BUDGET_SENTINEL

    def objects_of_type(self, type_name: str) -> list[str]:
        return sorted(name for name, t in self.objects if t == type_name)

    @property
    def has_budget(self) -> bool:
        return self.budget_limit != NO_BUDGET_SENTINEL


# ---------------------------------------------------------------------------
# Domain parsing
# ---------------------------------------------------------------------------

def _parse_literal(expr, what: str) -> SchemaLiteral:
    _check_head(expr, what)
    if not isinstance(expr, list) or not expr or not all(isinstance(x, str) for x in expr):
        raise PddlError(f"malformed literal in {what}: {expr!r}")
    return expr[0], tuple(expr[1:])


def _is_guard(expr) -> bool:
    return (
        isinstance(expr, list) and len(expr) == 3 and expr[0] == "<="
        and isinstance(expr[1], list) and len(expr[1]) == 3 and expr[1][0] == "+"
        and expr[1][1] == [COST_FLUENT]
        and expr[2] == [BUDGET_FLUENT]
    )


def _validate_schema_literal(
    lit: SchemaLiteral,
    params: dict[str, str],
    domain_predicates: dict[str, PredicateSchema],
    where: str,
) -> None:
    name, args = lit
    schema = domain_predicates.get(name)
    if schema is None:
        raise PddlError(f"undeclared predicate {name!r} in {where}")
    if len(args) != len(schema.param_types):
        raise PddlError(
            f"predicate {name!r} used with {len(args)} args in {where}, "
            f"declared with {len(schema.param_types)}"
        )
    for arg, expected in zip(args, schema.param_types):
        if not arg.startswith("?"):
            raise PddlError(f"non-variable {arg!r} in schema literal in {where}")
        actual = params.get(arg)
        if actual is None:
            raise PddlError(f"unbound variable {arg} in {where}")
        if actual != expected:
            raise PddlError(
                f"variable {arg} has type {actual!r} but predicate {name!r} "
                f"expects {expected!r} in {where}"
            )


def _parse_action(expr: list, types: set[str], predicates: dict[str, PredicateSchema]) -> ActionSchema:
    if len(expr) < 2 or not isinstance(expr[1], str):
        raise PddlError("(:action ...) missing a name")
    name = expr[1]
    sections: dict[str, object] = {}
    i = 2
    while i < len(expr):
        key = expr[i]
        if not isinstance(key, str) or not key.startswith(":"):
            raise PddlError(f"action {name}: expected a :keyword, got {key!r}")
        if i + 1 >= len(expr):
            raise PddlError(f"action {name}: {key} has no body")
        sections[key] = expr[i + 1]
        i += 2

    params_list = _parse_typed_list(sections.get(":parameters", []), f"action {name} parameters")
    params: dict[str, str] = {}
    for var, type_name in params_list:
        if not var.startswith("?"):
            raise PddlError(f"action {name}: parameter {var!r} must start with '?'")
        if type_name not in types:
            raise PddlError(f"action {name}: undeclared type {type_name!r}")
        if var in params:
            raise PddlError(f"action {name}: duplicate parameter {var}")
        params[var] = type_name

    # Preconditions
    precond = sections.get(":precondition", ["and"])
    _check_head(precond, f"action {name} precondition")
    if isinstance(precond, list) and precond and precond[0] == "and":
        items = precond[1:]
    else:
        items = [precond] if precond else []
    pres: list[SchemaLiteral] = []
    inequalities: list[tuple[str, str]] = []
    has_guard = False
    guard_amount: Optional[int] = None
    for item in items:
        _check_head(item, f"action {name} precondition")
        if _is_guard(item):
            if has_guard:
                raise PddlError(f"action {name}: multiple numeric guards")
            has_guard = True
            guard_amount = _parse_cost(item[1][2], name, "guard")
            continue
        if isinstance(item, list) and item and item[0] == "not":
            inner = item[1] if len(item) == 2 else None
            if (
                isinstance(inner, list) and len(inner) == 3 and inner[0] == "="
                and all(isinstance(x, str) and x.startswith("?") for x in inner[1:])
            ):
                inequalities.append((inner[1], inner[2]))
                continue
            raise PddlError(
                f"action {name}: only (not (= ?x ?y)) is allowed under 'not' "
                "in preconditions"
            )
        if isinstance(item, list) and item and item[0] == "=":
            raise PddlError(f"action {name}: positive equality preconditions not supported")
        lit = _parse_literal(item, f"action {name} precondition")
        _validate_schema_literal(lit, params, predicates, f"action {name} precondition")
        pres.append(lit)
    for a, b in inequalities:
        for var in (a, b):
            if var not in params:
                raise PddlError(f"action {name}: unbound variable {var} in inequality")

    # Effects
    effect = sections.get(":effect")
    if effect is None:
        raise PddlError(f"action {name}: missing :effect")
    _check_head(effect, f"action {name} effect")
    if isinstance(effect, list) and effect and effect[0] == "and":
        eff_items = effect[1:]
    else:
        eff_items = [effect]
    adds: list[SchemaLiteral] = []
    deletes: list[SchemaLiteral] = []
    cost = 0
    cost_seen = False
    for item in eff_items:
        _check_head(item, f"action {name} effect")
        if isinstance(item, list) and item and item[0] == "increase":
            if cost_seen:
                raise PddlError(f"action {name}: multiple cost effects")
            if len(item) != 3 or item[1] != [COST_FLUENT]:
                raise PddlError(f"action {name}: cost effect must increase ({COST_FLUENT})")
            cost = _parse_cost(item[2], name, "cost effect")
            cost_seen = True
            continue
        if isinstance(item, list) and item and item[0] == "not":
            if len(item) != 2:
                raise PddlError(f"action {name}: malformed delete effect")
            lit = _parse_literal(item[1], f"action {name} delete effect")
            _validate_schema_literal(lit, params, predicates, f"action {name} delete effect")
            deletes.append(lit)
            continue
        lit = _parse_literal(item, f"action {name} add effect")
        _validate_schema_literal(lit, params, predicates, f"action {name} add effect")
        adds.append(lit)

    overlap = set(adds) & set(deletes)
    if overlap:
        raise PddlError(f"action {name}: add and delete sets overlap on {sorted(overlap)}")
    if cost > 0 and not has_guard:
        raise PddlError(f"action {name}: cost-incurring action lacks the numeric budget guard")
    if has_guard and guard_amount != cost:
        raise PddlError(
            f"action {name}: guard amount {guard_amount} does not match cost {cost}"
        )

    return ActionSchema(
        name=name,
        parameters=tuple(params_list),
        preconditions=tuple(pres),
        inequalities=tuple(inequalities),
        adds=tuple(adds),
        deletes=tuple(deletes),
        cost=cost,
        has_guard=has_guard,
    )


def _parse_cost(token, action_name: str, where: str) -> int:
    if not isinstance(token, str):
        raise PddlError(f"action {action_name}: non-numeric amount in {where}")
    try:
        value = int(token)
    except ValueError:
        raise PddlError(f"action {action_name}: non-integer amount {token!r} in {where}")
    if value < 0:
        raise PddlError(f"action {action_name}: negative amount in {where}")
    return value


def parse_domain(text: str) -> PlanningDomain:
    expr = _read_sexpr(_tokenize(text))
    if not expr or expr[0] != "define":
        raise PddlError("domain must start with (define ...)")
    if len(expr) < 2 or not isinstance(expr[1], list) or expr[1][:1] != ["domain"]:
        raise PddlError("missing (domain <name>)")
    name = expr[1][1]

    types: list[str] = []
    predicates: list[PredicateSchema] = []
    action_exprs: list[list] = []
    functions_seen: set[str] = set()

    for section in expr[2:]:
        if not isinstance(section, list) or not section:
            raise PddlError(f"malformed domain section: {section!r}")
        head = section[0]
        if head == ":requirements":
            for req in section[1:]:
                if req not in _ALLOWED_REQUIREMENTS:
                    raise PddlError(f"unsupported requirement {req!r}")
        elif head == ":types":
            for tok in section[1:]:
                if tok == "-" or not isinstance(tok, str):
                    raise PddlError("type hierarchies are not supported")
                types.append(tok)
        elif head == ":functions":
            for fn in section[1:]:
                if not isinstance(fn, list) or len(fn) != 1:
                    raise PddlError(f"unsupported function declaration {fn!r}")
                if fn[0] not in (COST_FLUENT, BUDGET_FLUENT):
                    raise PddlError(
                        f"only ({COST_FLUENT}) and ({BUDGET_FLUENT}) functions are supported"
                    )
                functions_seen.add(fn[0])
        elif head == ":predicates":
            for pred in section[1:]:
                if not isinstance(pred, list) or not pred or not isinstance(pred[0], str):
                    raise PddlError(f"malformed predicate declaration {pred!r}")
                typed = _parse_typed_list(pred[1:], f"predicate {pred[0]}") if len(pred) > 1 else []
                for _, t in typed:
                    if t not in types:
                        raise PddlError(f"predicate {pred[0]}: undeclared type {t!r}")
                predicates.append(PredicateSchema(pred[0], tuple(t for _, t in typed)))
        elif head == ":action":
            action_exprs.append(section)
        elif head in (":durative-action", ":constraints", ":derived"):
            raise PddlError(f"unsupported PDDL feature {head!r}")
        else:
            raise PddlError(f"unknown domain section {head!r}")

    names = [p.name for p in predicates]
    if len(set(names)) != len(names):
        raise PddlError("duplicate predicate declarations")
    pred_map = {p.name: p for p in predicates}
    actions = [_parse_action(a, set(types), pred_map) for a in action_exprs]
    action_names = [a.name for a in actions]
    if len(set(action_names)) != len(action_names):
        raise PddlError("duplicate action names")
    return PlanningDomain(
        name=name,
        types=tuple(types),
        predicates=tuple(predicates),
        actions=tuple(actions),
    )


# ---------------------------------------------------------------------------
# Problem parsing / validation / rendering
# ---------------------------------------------------------------------------

def _parse_ground_literal(expr, what: str) -> GroundLiteral:
    _check_head(expr, what)
    if not isinstance(expr, list) or not expr or not all(isinstance(x, str) for x in expr):
        raise PddlError(f"malformed ground literal in {what}: {expr!r}")
    return expr[0], tuple(expr[1:])


def parse_problem(text: str, domain: PlanningDomain) -> PlanningProblem:
    expr = _read_sexpr(_tokenize(text))
    if not expr or expr[0] != "define":
        raise PddlError("problem must start with (define ...)")
    if len(expr) < 2 or not isinstance(expr[1], list) or expr[1][:1] != ["problem"]:
        raise PddlError("missing (problem <name>)")
    name = expr[1][1]

    domain_name = None
    objects: list[tuple[str, str]] = []
    init: set[GroundLiteral] = set()
    goals: set[GroundLiteral] = set()
    budget = NO_BUDGET_SENTINEL

    for section in expr[2:]:
        if not isinstance(section, list) or not section:
            raise PddlError(f"malformed problem section: {section!r}")
        head = section[0]
        if head == ":domain":
            domain_name = section[1]
        elif head == ":objects":
            objects = _parse_typed_list(section[1:], ":objects")
        elif head == ":init":
            for item in section[1:]:
                if isinstance(item, list) and item and item[0] == "=":
                    if len(item) != 3 or not isinstance(item[1], list):
                        raise PddlError(f"malformed fluent assignment {item!r}")
                    fluent = item[1][0]
                    value = int(item[2])
                    if fluent == COST_FLUENT:
                        if value != 0:
                            raise PddlError(f"({COST_FLUENT}) must start at 0")
                    elif fluent == BUDGET_FLUENT:
                        if value < 0:
                            raise PddlError(f"({BUDGET_FLUENT}) must be >= 0")
                        budget = value
                    else:
                        raise PddlError(f"unknown fluent {fluent!r} in :init")
                    continue
                init.add(_parse_ground_literal(item, ":init"))
        elif head == ":goal":
            body = section[1]
            _check_head(body, ":goal")
            items = body[1:] if isinstance(body, list) and body and body[0] == "and" else [body]
            for item in items:
                goals.add(_parse_ground_literal(item, ":goal"))
        else:
            raise PddlError(f"unknown problem section {head!r}")

    problem = PlanningProblem(
        name=name,
        domain_name=domain_name or domain.name,
        objects=tuple(objects),
        init=frozenset(init),
        goals=frozenset(goals),
        budget_limit=budget,
    )
    validate_problem(domain, problem)
    return problem


def validate_problem(domain: PlanningDomain, problem: PlanningProblem) -> None:
    """Check the problem's objects, init and goals against the domain."""
    declared = set(domain.types)
    obj_types: dict[str, str] = {}
    for obj, type_name in problem.objects:
        if type_name not in declared:
            raise PddlError(f"object {obj!r} has undeclared type {type_name!r}")
        if obj in obj_types:
            raise PddlError(f"duplicate object {obj!r}")
        obj_types[obj] = type_name
    if problem.budget_limit < 0:
        raise PddlError("budget-limit must be >= 0")

    def check(lit: GroundLiteral, where: str) -> None:
        pred, args = lit
        schema = domain.predicate(pred)
        if schema is None:
            raise PddlError(f"undeclared predicate {pred!r} in {where}")
        if len(args) != len(schema.param_types):
            raise PddlError(f"predicate {pred!r} arity mismatch in {where}")
        for arg, expected in zip(args, schema.param_types):
            actual = obj_types.get(arg)
            if actual is None:
                raise PddlError(f"unknown object {arg!r} in {where}")
            if actual != expected:
                raise PddlError(
                    f"object {arg!r} is a {actual}, predicate {pred!r} expects {expected} "
                    f"in {where}"
                )

    for lit in problem.init:
        check(lit, ":init")
    for lit in problem.goals:
        check(lit, ":goal")


def render_problem(problem: PlanningProblem) -> str:
    """Serialize a problem back to PDDL text."""
    by_type: dict[str, list[str]] = {}
    for obj, type_name in problem.objects:
        by_type.setdefault(type_name, []).append(obj)
    object_lines = [
        "    " + " ".join(sorted(names)) + f" - {type_name}"
        for type_name, names in sorted(by_type.items())
    ]
    init_lines = [
        "    (" + " ".join((lit[0], *lit[1])) + ")"
        for lit in sorted(problem.init)
    ]
    init_lines.append(f"    (= ({COST_FLUENT}) 0)")
    init_lines.append(f"    (= ({BUDGET_FLUENT}) {problem.budget_limit})")
    goal_lines = [
        "      (" + " ".join((lit[0], *lit[1])) + ")"
        for lit in sorted(problem.goals)
    ]
    return (
        f"(define (problem {problem.name})\n"
        f"  (:domain {problem.domain_name})\n"
        "  (:objects\n" + "\n".join(object_lines) + ")\n"
        "  (:init\n" + "\n".join(init_lines) + ")\n"
        "  (:goal (and\n" + "\n".join(goal_lines) + ")))\n"
    )
