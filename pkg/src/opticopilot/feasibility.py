"""Pre-planning physics and graph checks.

Latency bounds use great-circle distance at the speed of light in fiber; the
great circle is a lower bound on any installed route, which is exactly what
an infeasibility proof needs. Redundancy verification counts edge-disjoint
paths via unit-capacity max-flow (Menger's theorem).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from itertools import combinations
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from opticopilot.errors import ConfigurationError
from opticopilot.grammar import StructuredIntent

# km/s; propagation speed of light in single-mode fiber.
FIBER_SPEED_KM_PER_S = 200_000.0
EARTH_RADIUS_KM = 6371.0


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    """Great-circle distance on the mean-radius sphere."""
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dp = p2 - p1
    dl = math.radians(lon2 - lon1)
    a = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


def propagation_latency_ms(distance_km: float) -> float:
    return distance_km / FIBER_SPEED_KM_PER_S * 1000.0


class SiteRegistry:
    """Identifier -> (latitude, longitude) lookup for sites and cities."""

    def __init__(self, entries: dict[str, tuple[float, float]]):
        for name, (lat, lon) in entries.items():
            if not -90.0 <= lat <= 90.0 or not -180.0 <= lon <= 180.0:
                raise ConfigurationError(f"registry entry {name!r} has bad coordinates")
        self.entries = dict(entries)

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "SiteRegistry":
        path = Path(path)
        if not path.is_file():
            raise ConfigurationError(f"registry file not found: {path}")
        entries: dict[str, tuple[float, float]] = {}
        with path.open(encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames != ["identifier", "latitude", "longitude"]:
                raise ConfigurationError(
                    f"registry {path} must have header identifier,latitude,longitude"
                )
            for row in reader:
                name = row["identifier"].strip()
                if name in entries:
                    raise ConfigurationError(f"duplicate registry identifier {name!r}")
                entries[name] = (float(row["latitude"]), float(row["longitude"]))
        return cls(entries)

    def resolve(self, identifier: str) -> Optional[tuple[float, float]]:
        return self.entries.get(identifier)

    def __len__(self) -> int:
        return len(self.entries)


@lru_cache(maxsize=1)
def default_registry() -> SiteRegistry:
    path = resources.files("opticopilot").joinpath("data", "registry.csv")
    return SiteRegistry.from_csv(Path(str(path)))


@dataclass(frozen=True)
class LatencyViolation:
    site_a: str
    site_b: str
    distance_km: float
    min_latency_ms: float
    required_ms: int

    def describe(self) -> str:
        return (
            f"{self.site_a} - {self.site_b}: {self.distance_km:,.0f} km great-circle "
            f"needs at least {self.min_latency_ms:.1f} ms, above the requested "
            f"{self.required_ms} ms"
        )


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    violations: tuple[LatencyViolation, ...]
    warnings: tuple[str, ...]
    narrative: str


def _site_label(name: str, location: Optional[str]) -> str:
    return f"{name} ({location})" if location else name


def check_latency(intent: StructuredIntent, registry: SiteRegistry) -> FeasibilityVerdict:
    """Check the requested latency bound against propagation physics.

    Sites without resolvable coordinates are skipped with a warning; the
    check binds only where geography is known.
    """
    required = intent.constraints.latency_ms
    if required is None:
        raise ValueError("check_latency requires an intent with latency_ms present")

    located: list[tuple[str, tuple[float, float]]] = []
    warnings: list[str] = []
    for site in intent.sites:
        key = site.location or site.name
        coords = registry.resolve(key)
        if coords is None:
            warnings.append(
                f"site {site.name}: no coordinates for {key!r}; excluded from the latency check"
            )
        else:
            located.append((_site_label(site.name, site.location), coords))

    violations: list[LatencyViolation] = []
    for (label_a, pos_a), (label_b, pos_b) in combinations(located, 2):
        distance = haversine_km(*pos_a, *pos_b)
        floor_ms = propagation_latency_ms(distance)
        if floor_ms > required:
            violations.append(LatencyViolation(
                site_a=label_a,
                site_b=label_b,
                distance_km=distance,
                min_latency_ms=floor_ms,
                required_ms=required,
            ))
    violations.sort(key=lambda v: -v.min_latency_ms)

    if violations:
        worst = violations[:3]
        lines = "; ".join(v.describe() for v in worst)
        narrative = (
            f"The requested {required} ms latency bound is physically impossible: light in "
            f"fiber propagates at ~{FIBER_SPEED_KM_PER_S:,.0f} km/s, so the great-circle "
            f"distance already exceeds the bound on {len(violations)} site pair(s). "
            f"Worst pairs: {lines}."
        )
    else:
        narrative = (
            f"All {len(located)} located site pair(s) satisfy the {required} ms propagation "
            "floor."
        )
        if warnings:
            narrative += f" {len(warnings)} site(s) had no coordinates and were not checked."
    return FeasibilityVerdict(
        feasible=not violations,
        violations=tuple(violations),
        warnings=tuple(warnings),
        narrative=narrative,
    )


# ---------------------------------------------------------------------------
# Edge-disjoint paths
# ---------------------------------------------------------------------------

def _max_flow(capacity: dict[str, dict[str, int]], source: str, sink: str) -> int:
    """Edmonds-Karp on an integer-capacity digraph (BFS augmenting paths)."""
    residual = {u: dict(nbrs) for u, nbrs in capacity.items()}
    flow = 0
    while True:
        parents = {source: None}
        queue = [source]
        while queue and sink not in parents:
            u = queue.pop(0)
            for v, cap in residual.get(u, {}).items():
                if cap > 0 and v not in parents:
                    parents[v] = u
                    queue.append(v)
        if sink not in parents:
            return flow
        # bottleneck along the found path
        path = []
        v = sink
        while parents[v] is not None:
            u = parents[v]
            path.append((u, v))
            v = u
        bottleneck = min(residual[u][v] for u, v in path)
        for u, v in path:
            residual[u][v] -= bottleneck
            residual.setdefault(v, {})
            residual[v][u] = residual[v].get(u, 0) + bottleneck
        flow += bottleneck


def count_disjoint_paths(
    nodes: Sequence[str],
    edges: Iterable[tuple[str, str]],
) -> dict[tuple[str, str], int]:
    """Max edge-disjoint path count for every unordered node pair.

    Parallel edges add capacity; an undirected edge becomes one unit of
    capacity in each direction. Disconnected pairs count 0.
    """
    nodes = list(nodes)
    if len(nodes) < 2:
        raise ValueError("topology needs at least two nodes")
    capacity: dict[str, dict[str, int]] = {n: {} for n in nodes}
    for a, b in edges:
        if a == b:
            continue
        capacity[a][b] = capacity[a].get(b, 0) + 1
        capacity[b][a] = capacity[b].get(a, 0) + 1
    result: dict[tuple[str, str], int] = {}
    for a, b in combinations(sorted(nodes), 2):
        result[(a, b)] = _max_flow(capacity, a, b)
    return result
