"""Comparison algorithms and ground-truth oracles.

* ``frederickson`` -- the classic tour-splitting baseline: one global TSP
  tour over the whole glued environment, cut into m depot-anchored
  subtours by the k-splitour prefix rule.
* ``brute_force_contiguous`` -- exhaustive enumeration of contiguous
  partitions; the exactness oracle for the split-point solver.
* ``brute_force_mtsp_tiny`` -- the true optimum over every vertex
  partition and visiting order on very small instances; grounds the
  approximation-bound checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .environment import (
    DistanceMatrix,
    MetricGraph,
    ModularEnvironment,
    metric_closure,
)
from .solver import IntegerSolution, _block_time_fn
from .tsp import CoverageCostTable, backend_fn

BRUTE_FORCE_MODULE_CAP = 14
TINY_VERTEX_CAP = 9
TINY_ROBOT_CAP = 3


@dataclass(frozen=True)
class GluedGraph:
    """Union of all module graphs plus the doorway-chain linking edges."""

    graph: MetricGraph
    depot: str


@dataclass(frozen=True)
class MultiTourSolution:
    """m depot-anchored closed walks over the glued environment."""

    walks: tuple[tuple[str, ...], ...]
    times: tuple[float, ...]
    makespan: float
    backend: str = ""

    @property
    def total_time(self) -> float:
        return float(sum(self.times))

    @property
    def robots_used(self) -> int:
        return sum(1 for w in self.walks if len(w) > 1)

    @property
    def used_times(self) -> tuple[float, ...]:
        """Tour times of the robots with non-trivial walks."""
        return tuple(t for w, t in zip(self.walks, self.times) if len(w) > 1)


def glue_environment(env: ModularEnvironment) -> GluedGraph:
    """Assemble the single weighted graph the baselines operate on.

    Module vertex ids are already namespaced, so the union is disjoint;
    the n-1 linking edges may have zero weight (doorway sweeps go down to
    zero distance).
    """
    vertices: list[str] = []
    edges: list[tuple[str, str, float]] = []
    coords: dict[str, tuple[float, float]] = {}
    for mod in env.modules:
        vertices.extend(mod.graph.vertices)
        edges.extend(mod.graph.edges)
        coords.update(mod.graph.coords)
    for i, w in enumerate(env.linking, start=1):
        edges.append((env.doorway(i), env.doorway(i + 1), w))
    return GluedGraph(MetricGraph(tuple(vertices), tuple(edges), coords), env.depot)


def frederickson(
    env: ModularEnvironment,
    m: int,
    tsp_backend: str = "christofides",
    held_karp_cap: int = 15,
) -> MultiTourSolution:
    """k-splitour baseline: split one global tour into m depot-anchored subtours.

    With L the global tour time and c_max the largest depot-to-vertex
    distance, the j-th split point is the last tour vertex whose prefix
    time stays within (j/m) * (L - 2 c_max) + c_max; every subtour then
    rides from the depot to its segment and back.  Each subtour is bounded
    by L/m + 2 c_max.
    """
    if m < 1:
        raise ValueError(f"robot count must be >= 1, got {m}")
    glued = glue_environment(env)
    d = metric_closure(glued.graph)
    tour = backend_fn(tsp_backend, held_karp_cap)(d)

    depot = glued.depot
    if len(tour.vertices) == 1:
        walk = (depot,)
        walks = (walk,) + ((depot,),) * (m - 1)
        return MultiTourSolution(walks, (0.0,) * m, 0.0, tsp_backend)

    cycle = list(tour.vertices[:-1])
    at = cycle.index(depot)
    cycle = cycle[at:] + cycle[:at]
    K = len(cycle)
    hop = np.array(
        [d.d(cycle[t], cycle[t + 1]) for t in range(K - 1)] + [d.d(cycle[-1], depot)]
    )
    prefix = np.concatenate(([0.0], np.cumsum(hop)))  # prefix[t] = time to reach cycle[t]
    L = float(prefix[-1])
    c_max = float(max(d.d(depot, v) for v in d.vertices))

    if m == 1:
        closed = tuple(cycle) + (depot,)
        return MultiTourSolution((closed,), (L,), L, tsp_backend)

    splits = [0]
    for j in range(1, m):
        target = (j / m) * (L - 2.0 * c_max) + c_max
        s = int(np.searchsorted(prefix[:K], target, side="right") - 1)
        splits.append(max(s, splits[-1]))
    splits.append(K - 1)

    walks: list[tuple[str, ...]] = []
    times: list[float] = []
    for j in range(1, m + 1):
        a, b = splits[j - 1] + 1, splits[j]
        if a > b:
            walks.append((depot,))
            times.append(0.0)
            continue
        segment = cycle[a: b + 1]
        t = d.d(depot, segment[0]) + float(prefix[b] - prefix[a]) + d.d(segment[-1], depot)
        walks.append((depot,) + tuple(segment) + (depot,))
        times.append(t)
    return MultiTourSolution(tuple(walks), tuple(times), max(times), tsp_backend)


def brute_force_contiguous(
    env: ModularEnvironment, costs: CoverageCostTable, m: int
) -> IntegerSolution:
    """Enumerate every partition of 1..n into at most m contiguous blocks.

    Exponential in n; refuses n above the cap.  This is the independent
    exactness oracle for solve_integer and shares nothing with the DP
    beyond the block-time formula itself.
    """
    n = env.n
    if n > BRUTE_FORCE_MODULE_CAP:
        raise ValueError(
            f"brute-force enumeration capped at {BRUTE_FORCE_MODULE_CAP} modules (got {n})"
        )
    if m < 1:
        raise ValueError(f"robot count must be >= 1, got {m}")
    time_of, _, _ = _block_time_fn(env, costs)

    best_blocks: list[tuple[int, int]] | None = None
    best_makespan = None
    for b in range(1, min(m, n) + 1):
        for cuts in itertools.combinations(range(1, n), b - 1):
            bounds = (0,) + cuts + (n,)
            blocks = [(bounds[t] + 1, bounds[t + 1]) for t in range(b)]
            makespan = max(time_of(i, j) for i, j in blocks)
            if best_makespan is None or makespan < best_makespan:
                best_makespan = makespan
                best_blocks = blocks

    padded: list = list(best_blocks) + [None] * (m - len(best_blocks))
    times = tuple(time_of(*blk) if blk is not None else 0.0 for blk in padded)
    return IntegerSolution(tuple(padded), times, float(best_makespan), costs.backend)


def _subset_tour_costs(d: DistanceMatrix, depot_idx: int) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Exact closed-tour cost from the depot through every subset of the other vertices.

    Returns (cost per mask, best end vertex per mask, other-vertex index
    list); a Held-Karp style path DP with parent tracking reconstructs the
    visiting orders afterwards.
    """
    others = [i for i in range(d.size) if i != depot_idx]
    k = len(others)
    m = d.matrix
    full = 1 << k
    dp = np.full((full, max(k, 1)), np.inf)
    parent = np.full((full, max(k, 1)), -1, dtype=np.int8)
    for t in range(k):
        dp[1 << t, t] = m[depot_idx, others[t]]
    for mask in range(1, full):
        for t in range(k):
            if not (mask >> t) & 1 or not np.isfinite(dp[mask, t]):
                continue
            for s in range(k):
                if (mask >> s) & 1:
                    continue
                nm = mask | (1 << s)
                c = dp[mask, t] + m[others[t], others[s]]
                if c < dp[nm, s]:
                    dp[nm, s] = c
                    parent[nm, s] = t
    cost = np.zeros(full)
    end = np.full(full, -1, dtype=np.int8)
    for mask in range(1, full):
        closing = dp[mask] + np.array([m[others[t], depot_idx] for t in range(k)])
        t = int(np.argmin(closing))
        cost[mask] = closing[t]
        end[mask] = t
    return cost, (dp, parent, end), others


def brute_force_mtsp_tiny(env: ModularEnvironment, m: int) -> MultiTourSolution:
    """True optimal makespan over all vertex partitions and visiting orders.

    Exhaustive over assignments of vertices to robots, with an exact tour
    per robot on the glued metric closure; caps keep the test suite fast.
    """
    glued = glue_environment(env)
    total = glued.graph.size
    if total > TINY_VERTEX_CAP:
        raise ValueError(f"tiny mTSP oracle capped at {TINY_VERTEX_CAP} vertices (got {total})")
    if m > TINY_ROBOT_CAP:
        raise ValueError(f"tiny mTSP oracle capped at {TINY_ROBOT_CAP} robots (got {m})")
    if m < 1:
        raise ValueError(f"robot count must be >= 1, got {m}")
    d = metric_closure(glued.graph)
    depot_idx = d.index(glued.depot)
    cost, (dp, parent, end), others = _subset_tour_costs(d, depot_idx)
    k = len(others)
    full = (1 << k) - 1

    # g[mask][r] = best makespan covering `mask` with r robots
    g = {0: [0.0] * (m + 1)}
    choice: dict[tuple[int, int], int] = {}
    for mask in range(1, full + 1):
        g[mask] = [np.inf] * (m + 1)
        g[mask][1] = float(cost[mask])
        choice[(mask, 1)] = mask
        low = mask & (-mask)
        for r in range(2, m + 1):
            best = g[mask][r - 1]  # an idle robot is always allowed
            pick = 0
            sub = mask
            while sub:
                if sub & low:  # canonical: the part containing the lowest vertex
                    val = max(float(cost[sub]), g[mask ^ sub][r - 1])
                    if val < best:
                        best = val
                        pick = sub
                sub = (sub - 1) & mask
            g[mask][r] = best
            choice[(mask, r)] = pick

    def order_of(mask: int) -> list[int]:
        t = int(end[mask])
        rev = []
        while t >= 0:
            rev.append(others[t])
            nt = int(parent[mask, t])
            mask ^= 1 << t
            t = nt
        rev.reverse()
        return rev

    walks: list[tuple[str, ...]] = []
    times: list[float] = []
    mask, r = full, m
    while r > 0:
        part = choice[(mask, r)] if mask else 0
        if part == 0:
            walks.append((glued.depot,))
            times.append(0.0)
        else:
            verts = [d.vertices[i] for i in order_of(part)]
            walks.append((glued.depot,) + tuple(verts) + (glued.depot,))
            times.append(float(cost[part]))
            mask ^= part
        r -= 1
    if full == 0:  # single-vertex environment: nothing to visit beyond the depot
        times = [0.0] * m
        walks = [(glued.depot,)] * m
    return MultiTourSolution(tuple(walks), tuple(times), max(times), "exact")
