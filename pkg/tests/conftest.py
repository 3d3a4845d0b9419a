"""Shared instance builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from modcover import (
    CoverageCostTable,
    MetricGraph,
    ModularEnvironment,
    ModuleSpec,
    DistanceMatrix,
)


def synth_instance(taus, links) -> tuple[ModularEnvironment, CoverageCostTable]:
    """Environment of single-vertex modules with a supplied cost table.

    The solver only consumes tau values and linking weights, so this is the
    cheapest way to drive it with arbitrary numbers.
    """
    mods = tuple(ModuleSpec(MetricGraph(("v",), ()), "v") for _ in taus)
    env = ModularEnvironment(mods, tuple(float(w) for w in links))
    return env, CoverageCostTable(tuple(float(t) for t in taus), "exact")


def random_instance(rng, max_n=12, max_m=6):
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    taus = rng.uniform(0.01, 100.0, n)
    links = rng.uniform(0.0, 50.0, max(n - 1, 0))
    env, costs = synth_instance(taus, links)
    return env, costs, m


def small_templates(rooms_a: int, rooms_b: int, rooms_c: int, seed: int = 100):
    """Arbitrary-size template triple for plumbing tests (no size ordering)."""
    from modcover import ModuleTemplate

    return {
        "A": ModuleTemplate("ring", rooms=rooms_a, seed=seed + 1),
        "B": ModuleTemplate("star", rooms=rooms_b, seed=seed + 2),
        "C": ModuleTemplate("corridor", rooms=rooms_c, seed=seed + 3),
    }


def euclidean_metric(rng, n: int, side: float = 100.0) -> DistanceMatrix:
    pts = rng.random((n, 2)) * side
    m = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
    return DistanceMatrix(tuple(f"v{i}" for i in range(n)), m)


def random_connected_graph(rng, n: int, extra_edges: int = 0) -> MetricGraph:
    """Random spanning tree plus optional extra edges; weights in (0, 10]."""
    verts = tuple(f"v{i}" for i in range(n))
    edges = []
    for i in range(1, n):
        j = int(rng.integers(0, i))
        edges.append((verts[i], verts[j], float(rng.uniform(0.1, 10.0))))
    pairs = {(min(u, v), max(u, v)) for u, v, _ in edges}
    for _ in range(extra_edges):
        i, j = rng.integers(0, n, 2)
        key = (f"v{min(i, j)}", f"v{max(i, j)}")
        if i != j and key not in pairs:
            pairs.add(key)
            edges.append((key[0], key[1], float(rng.uniform(0.1, 10.0))))
    return MetricGraph(verts, tuple(edges))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
