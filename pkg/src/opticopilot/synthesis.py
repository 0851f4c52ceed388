"""Design synthesis: verified plans become costed network designs; proven
infeasibilities become explicitly-flagged heuristic sketches.

All money is integer USD. Every design element references the plan steps it
came from and every plan step is referenced by at least one element.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from opticopilot.errors import ConfigurationError
from opticopilot.feasibility import SiteRegistry, haversine_km
from opticopilot.grammar import StructuredIntent
from opticopilot.planning.plan import DeploymentPlan
from opticopilot.retrieval import EnrichedIntent

ACCEPTANCE_PAD_WEEKS = 4.0

_PHASE_BY_ACTION = {
    "commission-site": "site commissioning",
    "install-roadm": "equipment installation",
    "deploy-fiber": "fiber deployment",
    "activate-roadm": "equipment activation",
    "activate-fiber": "fiber activation",
    "verify-latency": "verification & protection",
    "configure-protection": "verification & protection",
    "complete-deployment": "network completion",
}
_PHASE_ORDER = [
    "site commissioning",
    "equipment installation",
    "fiber deployment",
    "equipment activation",
    "fiber activation",
    "verification & protection",
    "network completion",
]
_ACCEPTANCE_PHASE = "commissioning & acceptance"


# ---------------------------------------------------------------------------
# Configuration tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PriceEntry:
    model: str
    item_class: str
    unit_cost_usd: int


def load_price_table(path: Union[str, Path, None] = None) -> dict[str, PriceEntry]:
    if path is None:
        path = Path(str(resources.files("opticopilot").joinpath("data", "price_table.csv")))
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"price table not found: {path}")
    table: dict[str, PriceEntry] = {}
    with path.open(encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            table[row["action"]] = PriceEntry(
                model=row["model"],
                item_class=row["item_class"],
                unit_cost_usd=int(row["unit_cost_usd"]),
            )
    return table


def load_durations(path: Union[str, Path, None] = None) -> dict[str, float]:
    if path is None:
        path = Path(str(resources.files("opticopilot").joinpath("data", "durations.csv")))
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"durations table not found: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        return {row["action"]: float(row["weeks"]) for row in csv.DictReader(fh)}


# ---------------------------------------------------------------------------
# Design model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiberRoute:
    site_a: str
    site_b: str
    fiber_id: str
    fiber_type: str
    length_km: Optional[float]
    cost_usd: int
    step_refs: tuple[int, ...]


@dataclass(frozen=True)
class BomLine:
    item_class: str
    model: str
    unit_cost_usd: int
    quantity: int
    site: Optional[str]
    step_refs: tuple[int, ...]

    @property
    def extended_cost_usd(self) -> int:
        return self.unit_cost_usd * self.quantity


@dataclass(frozen=True)
class ConstraintStatus:
    name: str
    status: str  # met | not-applicable | degraded
    detail: str


@dataclass(frozen=True)
class TimelinePhase:
    name: str
    start_week: float
    weeks: float


@dataclass(frozen=True)
class NetworkDesign:
    sites: tuple[dict, ...]
    fiber_routes: tuple[FiberRoute, ...]
    equipment: tuple[BomLine, ...]
    cost_breakdown: tuple[tuple[str, int], ...]
    grand_total_usd: int
    timeline_weeks: int
    timeline_phases: tuple[TimelinePhase, ...]
    guidance_applied: tuple[str, ...]
    constraint_report: tuple[ConstraintStatus, ...]
    verified: bool = True

    def referenced_steps(self) -> set[int]:
        refs: set[int] = set()
        for route in self.fiber_routes:
            refs.update(route.step_refs)
        for line in self.equipment:
            refs.update(line.step_refs)
        return refs

    def to_json_dict(self) -> dict:
        return {
            "verified": self.verified,
            "degraded": False,
            "sites": list(self.sites),
            "fiber_routes": [
                {
                    "pair": [r.site_a, r.site_b],
                    "fiber_id": r.fiber_id,
                    "fiber_type": r.fiber_type,
                    "length_km": r.length_km,
                    "cost_usd": r.cost_usd,
                    "step_refs": list(r.step_refs),
                }
                for r in self.fiber_routes
            ],
            "equipment": [
                {
                    "item_class": b.item_class,
                    "model": b.model,
                    "unit_cost_usd": b.unit_cost_usd,
                    "quantity": b.quantity,
                    "site": b.site,
                    "step_refs": list(b.step_refs),
                }
                for b in self.equipment
            ],
            "cost_breakdown": {phase: usd for phase, usd in self.cost_breakdown},
            "grand_total_usd": self.grand_total_usd,
            "timeline_weeks": self.timeline_weeks,
            "timeline_phases": [
                {"name": p.name, "start_week": p.start_week, "weeks": p.weeks}
                for p in self.timeline_phases
            ],
            "guidance_applied": list(self.guidance_applied),
            "constraint_report": [
                {"name": c.name, "status": c.status, "detail": c.detail}
                for c in self.constraint_report
            ],
        }

    def to_markdown(self) -> str:
        lines = ["# Network Design", ""]
        lines += ["## Topology", ""]
        for site in self.sites:
            role = f" ({site['role']})" if site.get("role") else ""
            loc = f" in {site['location']}" if site.get("location") else ""
            lines.append(f"- {site['name']}{loc}{role}")
        lines.append("")
        for r in self.fiber_routes:
            length = f"{r.length_km:,.0f} km" if r.length_km is not None else "length unknown"
            lines.append(
                f"- {r.site_a} <-> {r.site_b}: {r.fiber_type} fiber ({r.fiber_id}), "
                f"{length}, ${r.cost_usd:,}"
            )
        lines += ["", "## Equipment", ""]
        for b in self.equipment:
            where = f" @ {b.site}" if b.site else ""
            lines.append(
                f"- {b.quantity}x {b.model} [{b.item_class}]{where}: ${b.extended_cost_usd:,}"
            )
        lines += ["", "## Costs", ""]
        for phase, usd in self.cost_breakdown:
            lines.append(f"- {phase}: ${usd:,}")
        lines.append(f"- **grand total: ${self.grand_total_usd:,}**")
        lines += ["", "## Timeline", ""]
        for p in self.timeline_phases:
            lines.append(f"- week {p.start_week:g}: {p.name} ({p.weeks:g} wk)")
        lines.append(f"- **total: {self.timeline_weeks} weeks**")
        lines += ["", "## Constraints", ""]
        for c in self.constraint_report:
            lines.append(f"- {c.name}: {c.status} - {c.detail}")
        lines += ["", "## Guidance", ""]
        for doc_id in self.guidance_applied:
            lines.append(f"- {doc_id}")
        lines += ["", "## Traceability", ""]
        refs = sorted(self.referenced_steps())
        lines.append(f"- plan steps referenced by design elements: {refs}")
        return "\n".join(lines)


@dataclass(frozen=True)
class DegradedDesign:
    sites: tuple[dict, ...]
    topology_links: tuple[tuple[str, str], ...]
    topology_style: str  # ring | hub-and-spoke
    indicative_equipment: tuple[BomLine, ...]
    indicative_cost_usd: int
    limitation_notice: str
    educational_feedback: str

    def to_json_dict(self) -> dict:
        return {
            "verified": False,
            "degraded": True,
            "limitation_notice": self.limitation_notice,
            "educational_feedback": self.educational_feedback,
            "topology_style": self.topology_style,
            "sites": list(self.sites),
            "fiber_routes": [
                {"pair": [a, b], "fiber_type": "G.652", "verified": False}
                for a, b in self.topology_links
            ],
            "indicative_equipment": [
                {
                    "item_class": b.item_class,
                    "model": b.model,
                    "unit_cost_usd": b.unit_cost_usd,
                    "quantity": b.quantity,
                    "site": b.site,
                }
                for b in self.indicative_equipment
            ],
            "indicative_cost_usd": self.indicative_cost_usd,
        }

    def to_markdown(self) -> str:
        lines = [
            "# Network Design (UNVERIFIED - degraded mode)",
            "",
            f"**Limitation:** {self.limitation_notice}",
            "",
            f"**Why:** {self.educational_feedback}",
            "",
            f"## Heuristic topology ({self.topology_style})",
            "",
        ]
        for a, b in self.topology_links:
            lines.append(f"- {a} <-> {b}")
        lines += ["", f"Indicative cost (not a verified estimate): ${self.indicative_cost_usd:,}"]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Plan -> design translation
# ---------------------------------------------------------------------------

def _site_entries(intent: StructuredIntent) -> tuple[dict, ...]:
    out = []
    for s in intent.sites:
        entry: dict = {"name": s.name}
        if s.location:
            entry["location"] = s.location
        if s.role:
            entry["role"] = s.role
        out.append(entry)
    return tuple(out)


def _deploy_rounds(pairs: Sequence[tuple[str, str]]) -> int:
    """Greedy scheduling of fiber builds into endpoint-disjoint parallel rounds."""
    remaining = list(pairs)
    rounds = 0
    while remaining:
        busy: set[str] = set()
        next_round = []
        for a, b in remaining:
            if a in busy or b in busy:
                next_round.append((a, b))
            else:
                busy.update((a, b))
        remaining = next_round
        rounds += 1
    return rounds


def translate(
    plan: DeploymentPlan,
    intent: EnrichedIntent,
    registry: Optional[SiteRegistry] = None,
    price_table: Optional[dict[str, PriceEntry]] = None,
    durations: Optional[dict[str, float]] = None,
    require_validated: bool = True,
) -> NetworkDesign:
    """Deterministic plan-to-design mapping with full step traceability."""
    if not plan.feasible:
        raise ValueError("translate requires a feasible plan")
    if require_validated and not plan.validated:
        raise ValueError("translate requires a validated plan; run validate_plan first")
    if price_table is None:
        price_table = load_price_table()
    if durations is None:
        durations = load_durations()

    base = intent.base
    guidance_text = " ".join(hit.text for hit in intent.guidance)
    fiber_type = "OS2" if "OS2" in guidance_text else "G.652"

    coords: dict[str, tuple[float, float]] = {}
    if registry is not None:
        for s in base.sites:
            pos = registry.resolve(s.location or s.name)
            if pos is not None:
                coords[s.name] = pos

    # Per-step incremental costs from the cumulative checkpoints.
    deltas: list[int] = []
    previous = 0
    for step in plan.steps:
        deltas.append(step.cumulative_cost - previous)
        previous = step.cumulative_cost

    routes: list[FiberRoute] = []
    equipment: list[BomLine] = []
    phase_costs: dict[str, int] = {}
    activation_by_fiber: dict[str, tuple[int, int]] = {}

    for number, step in enumerate(plan.steps, start=1):
        if step.action == "activate-fiber":
            activation_by_fiber[step.args[2]] = (number, deltas[number - 1])

    for number, step in enumerate(plan.steps, start=1):
        delta = deltas[number - 1]
        phase = _PHASE_BY_ACTION.get(step.action, "other")
        phase_costs[phase] = phase_costs.get(phase, 0) + delta
        price = price_table.get(step.action)
        model = price.model if price else step.action
        item_class = price.item_class if price else "service"

        if step.action == "deploy-fiber":
            a, b, fiber_id = step.args
            activation = activation_by_fiber.get(fiber_id)
            refs = (number,) if activation is None else (number, activation[0])
            cost = delta + (activation[1] if activation else 0)
            length = None
            if a in coords and b in coords:
                length = round(haversine_km(*coords[a], *coords[b]), 1)
            routes.append(FiberRoute(
                site_a=a, site_b=b, fiber_id=fiber_id, fiber_type=fiber_type,
                length_km=length, cost_usd=cost, step_refs=refs,
            ))
        elif step.action == "activate-fiber":
            continue  # costed into its route
        else:
            site = step.args[0] if step.args else None
            if step.action == "complete-deployment":
                site = None
            equipment.append(BomLine(
                item_class=item_class, model=model, unit_cost_usd=delta,
                quantity=1, site=site, step_refs=(number,),
            ))

    breakdown = [(p, phase_costs[p]) for p in _PHASE_ORDER if p in phase_costs]
    grand_total = sum(usd for _, usd in breakdown)
    assert grand_total == plan.total_cost, "cost conservation violated"

    # Timeline: same-phase work runs in parallel across sites; fiber builds
    # sharing an endpoint serialize; phases run sequentially.
    phases: list[TimelinePhase] = []
    clock = 0.0
    actions_present = {s.action for s in plan.steps}
    for phase_name in _PHASE_ORDER:
        phase_actions = [a for a, p in _PHASE_BY_ACTION.items() if p == phase_name]
        present = [a for a in phase_actions if a in actions_present]
        if not present:
            continue
        if phase_name == "fiber deployment":
            pairs = [(s.args[0], s.args[1]) for s in plan.steps if s.action == "deploy-fiber"]
            weeks = _deploy_rounds(pairs) * durations.get("deploy-fiber", 0.0)
        else:
            weeks = max(durations.get(a, 0.0) for a in present)
        phases.append(TimelinePhase(name=phase_name, start_week=clock, weeks=weeks))
        clock += weeks
    if plan.steps:
        phases.append(TimelinePhase(
            name=_ACCEPTANCE_PHASE, start_week=clock, weeks=ACCEPTANCE_PAD_WEEKS,
        ))
        clock += ACCEPTANCE_PAD_WEEKS
    timeline_weeks = math.ceil(clock)

    report = _constraint_report(base, intent, plan, routes)

    return NetworkDesign(
        sites=_site_entries(base),
        fiber_routes=tuple(routes),
        equipment=tuple(equipment),
        cost_breakdown=tuple(breakdown),
        grand_total_usd=grand_total,
        timeline_weeks=timeline_weeks,
        timeline_phases=tuple(phases),
        guidance_applied=tuple(h.doc_id for h in intent.guidance),
        constraint_report=report,
        verified=True,
    )


def _constraint_report(
    base: StructuredIntent,
    intent: EnrichedIntent,
    plan: DeploymentPlan,
    routes: Sequence[FiberRoute],
) -> tuple[ConstraintStatus, ...]:
    from opticopilot.feasibility import count_disjoint_paths

    cons = base.constraints
    report: list[ConstraintStatus] = []
    if cons.availability is not None:
        if intent.guidance:
            detail = f"{len(intent.guidance)} guidance clause(s) applied to the design"
            report.append(ConstraintStatus("availability", "met", detail))
        else:
            report.append(ConstraintStatus(
                "availability", "not-applicable", "no guidance matched this tier"
            ))
    if cons.disjoint_paths is not None:
        nodes = [s.name for s in base.sites]
        edges = [(r.site_a, r.site_b) for r in routes]
        counts = count_disjoint_paths(nodes, edges)
        worst = min(counts.values()) if counts else 0
        if worst >= cons.disjoint_paths:
            report.append(ConstraintStatus(
                "disjoint_paths", "met",
                f"every site pair has >= {cons.disjoint_paths} edge-disjoint paths",
            ))
        else:
            report.append(ConstraintStatus(
                "disjoint_paths", "degraded",
                f"requested {cons.disjoint_paths} edge-disjoint paths per pair; the "
                f"planned topology provides {worst} (redundancy goal relaxed to "
                "pairwise connectivity)",
            ))
    if cons.latency_ms is not None:
        report.append(ConstraintStatus(
            "latency_ms", "met",
            f"propagation pre-check passed for the {cons.latency_ms} ms bound",
        ))
    if cons.budget_usd is not None:
        report.append(ConstraintStatus(
            "budget_usd", "met",
            f"total ${plan.total_cost:,} within budget ${cons.budget_usd:,}",
        ))
    if cons.compliance is not None:
        report.append(ConstraintStatus(
            "compliance", "met",
            "declared standards validated against the corpus allowlist: "
            + ", ".join(cons.compliance),
        ))
    return tuple(report)


# ---------------------------------------------------------------------------
# Graceful degradation
# ---------------------------------------------------------------------------

def degrade(
    intent: EnrichedIntent,
    reason: str,
    price_table: Optional[dict[str, PriceEntry]] = None,
) -> DegradedDesign:
    """Heuristic, explicitly-unverified topology for a proven-infeasible intent."""
    base = intent.base
    names = [s.name for s in base.sites]
    if price_table is None:
        price_table = load_price_table()

    if len(names) <= 5:
        style = "ring"
        if len(names) == 2:
            links = [(names[0], names[1])]
        else:
            links = [(names[i], names[(i + 1) % len(names)]) for i in range(len(names))]
    else:
        style = "hub-and-spoke"
        hub = next(
            (s.name for s in base.sites if s.role == "hub"),
            next((s.name for s in base.sites if s.role == "core"), names[0]),
        )
        links = [(hub, n) for n in names if n != hub]

    roadm = price_table["install-roadm"]
    fiber_unit = (
        price_table["deploy-fiber"].unit_cost_usd
        + price_table["activate-fiber"].unit_cost_usd
    )
    equipment = [
        BomLine(
            item_class=roadm.item_class, model=roadm.model,
            unit_cost_usd=roadm.unit_cost_usd, quantity=len(names),
            site=None, step_refs=(),
        ),
        BomLine(
            item_class="fiber-route", model=price_table["deploy-fiber"].model,
            unit_cost_usd=fiber_unit, quantity=len(links), site=None, step_refs=(),
        ),
    ]
    indicative = sum(b.extended_cost_usd for b in equipment)

    notice = (
        "Formal planning could not verify this design: "
        f"{reason} The topology below is a heuristic sketch and is NOT verified."
    )
    if "km/s" in reason:
        feedback = reason
    else:
        feedback = (
            f"{reason} Light in single-mode fiber propagates at ~200,000 km/s; "
            "distance, equipment and budget bounds are hard physical and economic "
            "limits that rephrasing the request cannot change."
        )
    return DegradedDesign(
        sites=_site_entries(base),
        topology_links=tuple(links),
        topology_style=style,
        indicative_equipment=tuple(equipment),
        indicative_cost_usd=indicative,
        limitation_notice=notice,
        educational_feedback=feedback,
    )


# ---------------------------------------------------------------------------
# Canonical sentence rendering
# ---------------------------------------------------------------------------

_UNQUOTED_CITY = r"[A-Z][A-Za-z]*"


def _render_city(city: str) -> str:
    import re

    words = city.split(" ")
    if words and all(re.fullmatch(_UNQUOTED_CITY, w) and not any(c.isdigit() for c in w)
                     for w in words):
        return city
    return f'"{city}"'


def render_canonical(intent: StructuredIntent) -> str:
    """The unique canonical sentence that parses back to this intent.

    Clause order: availability, sites, redundancy, latency, budget,
    compliance.
    """
    cons = intent.constraints
    parts = ["We need a"]
    if cons.availability:
        parts.append(cons.availability)
    parts.append("optical network connecting")

    rendered_sites = []
    for s in intent.sites:
        text = s.name
        if s.location:
            text += f" in {_render_city(s.location)}"
        if s.role:
            text += f" ({s.role})"
        rendered_sites.append(text)
    if len(rendered_sites) == 1:
        parts.append(rendered_sites[0])
    elif rendered_sites:
        parts.append(", ".join(rendered_sites[:-1]) + " and " + rendered_sites[-1])
    # an empty site tuple renders no sites clause (mutation corpora use this)

    if cons.disjoint_paths is not None:
        parts.append(
            f"support continuous operation with at least {cons.disjoint_paths} "
            "geographically disjoint fiber paths between each pair of sites"
        )
    if cons.latency_ms is not None:
        parts.append(f"Maximum acceptable latency per path is {cons.latency_ms} milliseconds")
    if cons.budget_usd is not None:
        parts.append(f"Our total budget for components is ${cons.budget_usd}")
    if cons.compliance:
        parts.append("compliant with " + ", ".join(cons.compliance))
    return " ".join(parts)
