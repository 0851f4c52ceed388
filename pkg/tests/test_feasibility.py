"""Latency physics and disjoint-path counting, each against an independent oracle."""

import math
import random
from itertools import combinations

import pytest

from opticopilot.errors import ConfigurationError
from opticopilot.feasibility import (
    EARTH_RADIUS_KM,
    FIBER_SPEED_KM_PER_S,
    SiteRegistry,
    check_latency,
    count_disjoint_paths,
    default_registry,
    haversine_km,
)
from opticopilot.grammar import ConstraintSet, SiteSpec, StructuredIntent


def oracle_haversine(lat1, lon1, lat2, lon2):
    # Independent arrangement: atan2 form of the haversine.
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dphi = p2 - p1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlmb / 2) ** 2
    return EARTH_RADIUS_KM * 2 * math.atan2(math.sqrt(a), math.sqrt(1 - a))


def intent_with_latency(cities, latency_ms):
    sites = tuple(
        SiteSpec(f"SITE{i + 1}", location=city) for i, city in enumerate(cities)
    )
    return StructuredIntent(sites=sites, constraints=ConstraintSet(latency_ms=latency_ms))


class TestHaversine:
    def test_nyc_la_distance(self):
        reg = default_registry()
        d = haversine_km(*reg.resolve("New York"), *reg.resolve("Los Angeles"))
        assert d == pytest.approx(3936, abs=10)

    def test_matches_oracle_over_registry(self):
        reg = default_registry()
        coords = list(reg.entries.values())
        for (a, b) in combinations(coords[:12], 2):
            assert haversine_km(*a, *b) == pytest.approx(oracle_haversine(*a, *b), rel=1e-9)

    def test_symmetry_and_identity(self):
        reg = default_registry()
        a = reg.resolve("Chicago")
        b = reg.resolve("Denver")
        assert haversine_km(*a, *b) == pytest.approx(haversine_km(*b, *a))
        assert haversine_km(*a, *a) == 0.0

    def test_triangle_inequality(self):
        reg = default_registry()
        cities = ["New York", "Chicago", "Denver", "Seattle", "Miami"]
        for x, y, z in combinations(cities, 3):
            cx, cy, cz = (reg.resolve(c) for c in (x, y, z))
            assert haversine_km(*cx, *cz) <= (
                haversine_km(*cx, *cy) + haversine_km(*cy, *cz) + 1e-6
            )


class TestRegistry:
    def test_bundled_size(self):
        assert len(default_registry()) >= 20

    def test_csv_round_trip(self, tmp_path):
        p = tmp_path / "reg.csv"
        p.write_text("identifier,latitude,longitude\nTestville,10.0,20.0\n")
        reg = SiteRegistry.from_csv(p)
        assert reg.resolve("Testville") == (10.0, 20.0)

    def test_bad_header_rejected(self, tmp_path):
        p = tmp_path / "reg.csv"
        p.write_text("name,lat,lon\nX,0,0\n")
        with pytest.raises(ConfigurationError):
            SiteRegistry.from_csv(p)

    def test_out_of_range_coordinates_rejected(self):
        with pytest.raises(ConfigurationError):
            SiteRegistry({"X": (95.0, 0.0)})

    def test_duplicate_identifiers_rejected(self, tmp_path):
        p = tmp_path / "reg.csv"
        p.write_text("identifier,latitude,longitude\nX,0,0\nX,1,1\n")
        with pytest.raises(ConfigurationError):
            SiteRegistry.from_csv(p)


class TestCheckLatency:
    def test_transcontinental_1ms_violation(self):
        intent = intent_with_latency(["New York", "Los Angeles"], 1)
        verdict = check_latency(intent, default_registry())
        assert not verdict.feasible
        v = verdict.violations[0]
        assert v.min_latency_ms == pytest.approx(19.7, abs=0.5)
        assert "200,000" in verdict.narrative

    def test_identical_coordinates_feasible(self, tmp_path):
        p = tmp_path / "reg.csv"
        p.write_text(
            "identifier,latitude,longitude\nHere,40.0,-75.0\nAlso Here,40.0,-75.0\n"
        )
        reg = SiteRegistry.from_csv(p)
        intent = intent_with_latency(["Here", "Also Here"], 1)
        assert check_latency(intent, reg).feasible

    def test_strict_inequality_at_boundary(self, tmp_path):
        # Two points exactly 2,000 km apart need exactly 10 ms: not a violation.
        lat = 2000.0 / EARTH_RADIUS_KM * 180.0 / math.pi
        p = tmp_path / "reg.csv"
        p.write_text(f"identifier,latitude,longitude\nOrigin,0.0,0.0\nNorth,{lat},0.0\n")
        reg = SiteRegistry.from_csv(p)
        intent = intent_with_latency(["Origin", "North"], 10)
        verdict = check_latency(intent, reg)
        d = haversine_km(0.0, 0.0, lat, 0.0)
        assert d == pytest.approx(2000.0, abs=1e-6)
        assert verdict.feasible

    def test_unresolvable_sites_warn_not_fail(self):
        intent = StructuredIntent(
            sites=(SiteSpec("SITE1"), SiteSpec("SITE2")),
            constraints=ConstraintSet(latency_ms=1),
        )
        verdict = check_latency(intent, default_registry())
        assert verdict.feasible
        assert len(verdict.warnings) == 2

    def test_latency_precondition(self):
        intent = StructuredIntent(
            sites=(SiteSpec("SITE1"), SiteSpec("SITE2")), constraints=ConstraintSet()
        )
        with pytest.raises(ValueError):
            check_latency(intent, default_registry())

    def test_relaxing_bound_preserves_feasibility(self):
        reg = default_registry()
        cities = ["New York", "Chicago", "Boston"]
        for bound in (6, 8, 20, 100):
            verdict = check_latency(intent_with_latency(cities, bound), reg)
            if verdict.feasible:
                # every looser bound must also be feasible
                for looser in (bound + 1, bound * 2):
                    assert check_latency(intent_with_latency(cities, looser), reg).feasible

    def test_verdict_invariant(self):
        reg = default_registry()
        for bound in (1, 5, 50):
            verdict = check_latency(
                intent_with_latency(["New York", "Los Angeles", "Chicago"], bound), reg
            )
            assert verdict.feasible == (not verdict.violations)
            for v in verdict.violations:
                assert v.min_latency_ms > v.required_ms


# ---------------------------------------------------------------------------
# Disjoint paths
# ---------------------------------------------------------------------------

def oracle_disjoint_paths(edges, s, t):
    """Brute force: exhaust every choice of first path and recurse on the
    remaining edge multiset. Memoized on the multiset so it stays tractable."""
    memo = {}

    def edge_paths(edge_list):
        adj = {}
        for i, (a, b) in enumerate(edge_list):
            adj.setdefault(a, []).append((b, i))
            adj.setdefault(b, []).append((a, i))
        paths = []

        def walk(node, used_edges, path_edges):
            if node == t:
                paths.append(tuple(path_edges))
                return
            for nxt, idx in adj.get(node, []):
                if idx not in used_edges:
                    walk(nxt, used_edges | {idx}, path_edges + [idx])

        walk(s, frozenset(), [])
        return paths

    def solve(edge_list):
        key = tuple(sorted(tuple(sorted(e)) for e in edge_list))
        if key in memo:
            return memo[key]
        best = 0
        for path in edge_paths(edge_list):
            remaining = [e for i, e in enumerate(edge_list) if i not in set(path)]
            best = max(best, 1 + solve(remaining))
        memo[key] = best
        return best

    return solve(list(edges))


class TestDisjointPaths:
    def test_triangle(self):
        counts = count_disjoint_paths(["A", "B", "C"], [("A", "B"), ("B", "C"), ("A", "C")])
        assert counts == {("A", "B"): 2, ("A", "C"): 2, ("B", "C"): 2}

    def test_triangle_with_parallel_edge(self):
        counts = count_disjoint_paths(
            ["A", "B", "C"],
            [("A", "B"), ("A", "B"), ("B", "C"), ("A", "C")],
        )
        assert counts[("A", "B")] == 3
        assert counts[("A", "C")] == 2
        assert counts[("B", "C")] == 2
        # Oracle confirmation on the multigraph.
        edges = [("A", "B"), ("A", "B"), ("B", "C"), ("A", "C")]
        assert oracle_disjoint_paths(edges, "A", "B") == 3

    def test_disconnected_pair(self):
        counts = count_disjoint_paths(["A", "B", "C", "D"], [("A", "B"), ("C", "D")])
        assert counts[("A", "C")] == 0
        assert counts[("A", "B")] == 1

    def test_single_node_pair_requires_two_nodes(self):
        with pytest.raises(ValueError):
            count_disjoint_paths(["A"], [])

    def test_matches_oracle_on_random_multigraphs(self):
        rng = random.Random(1729)
        labels = ["A", "B", "C", "D", "E", "F"]
        for _ in range(60):
            n = rng.randint(2, 6)
            nodes = labels[:n]
            m = rng.randint(1, 10)
            edges = []
            for _ in range(m):
                a, b = rng.sample(nodes, 2)
                edges.append((a, b))
            counts = count_disjoint_paths(nodes, edges)
            for (a, b), got in counts.items():
                assert got == oracle_disjoint_paths(edges, a, b), (nodes, edges, a, b)
