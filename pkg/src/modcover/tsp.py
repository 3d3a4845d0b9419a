"""Single-module TSP backends and coverage-time extraction.

Three interchangeable backends compute a closed tour over a metric
(distance matrix):

* ``held_karp``  -- exact bitmask dynamic program, capped at 15 vertices;
* ``christofides`` -- MST + exact minimum-weight perfect matching on the
  odd-degree vertices + Euler circuit + shortcutting (3/2 guarantee);
* ``greedy_tour`` -- nearest neighbor with 2-opt polishing, no guarantee.

``module_coverage_time`` runs a backend on a module's metric closure and
rotates the tour so it starts and ends at the doorway.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import networkx as nx
import numpy as np

from .environment import DistanceMatrix, ModuleSpec, metric_closure

HELD_KARP_CAP = 15

BACKENDS = ("exact", "christofides", "greedy")


@dataclass(frozen=True)
class Tour:
    """Closed tour: vertex id sequence (first == last when longer than one) and its time."""

    vertices: tuple[str, ...]
    time: float

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "time", float(self.time))


@dataclass(frozen=True)
class CoverageCostTable:
    """Per-module coverage times tau(i) plus, optionally, the anchored tours."""

    tau: tuple[float, ...]
    backend: str
    tours: Optional[tuple[Tour, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "tau", tuple(float(t) for t in self.tau))

    def __len__(self) -> int:
        return len(self.tau)


def tour_time(d: DistanceMatrix, vertices: Sequence[str]) -> float:
    """Recompute a tour's time by summing consecutive hop distances."""
    return float(
        sum(d.d(u, v) for u, v in zip(vertices[:-1], vertices[1:]))
    )


def _close_tour(d: DistanceMatrix, order: list[int]) -> Tour:
    """Build a closed Tour from a vertex-index visiting order."""
    ids = [d.vertices[i] for i in order]
    if len(ids) == 1:
        return Tour((ids[0],), 0.0)
    closed = ids + [ids[0]]
    m = d.matrix
    t = float(sum(m[a, b] for a, b in zip(order, order[1:] + [order[0]])))
    return Tour(tuple(closed), t)


def held_karp(d: DistanceMatrix, max_vertices: int = HELD_KARP_CAP) -> Tour:
    """Exact minimum-time closed tour by the Held-Karp subset DP.

    O(2^n n^2); refuses instances above ``max_vertices`` and points the
    caller at the christofides backend instead.
    """
    n = d.size
    if n > max_vertices:
        raise ValueError(
            f"held_karp is capped at {max_vertices} vertices (got {n}); "
            "use the christofides backend for larger instances"
        )
    if n == 1:
        return _close_tour(d, [0])
    if n == 2:
        return _close_tour(d, [0, 1])

    m = d.matrix
    k = n - 1  # vertices 1..n-1 tracked in the bitmask; tours start at 0
    sub = m[1:, 1:]
    from0 = m[0, 1:]
    full = (1 << k) - 1
    dp = np.full((1 << k, k), np.inf)
    parent = np.full((1 << k, k), -1, dtype=np.int16)
    for j in range(k):
        dp[1 << j, j] = from0[j]

    others = np.arange(k)
    for mask in range(1, full + 1):
        row = dp[mask]
        active = others[np.isfinite(row)]
        if active.size == 0:
            continue
        rest = others[(mask >> others) & 1 == 0]
        if rest.size == 0:
            continue
        cand = row[active, None] + sub[np.ix_(active, rest)]
        best = np.argmin(cand, axis=0)
        vals = cand[best, np.arange(rest.size)]
        for t, j in enumerate(rest):
            nm = mask | (1 << j)
            if vals[t] < dp[nm, j]:
                dp[nm, j] = vals[t]
                parent[nm, j] = active[best[t]]

    closing = dp[full] + from0
    end = int(np.argmin(closing))
    order = [end]
    mask = full
    while parent[mask, order[-1]] >= 0:
        prev = int(parent[mask, order[-1]])
        mask ^= 1 << order[-1]
        order.append(prev)
    order.reverse()
    return _close_tour(d, [0] + [j + 1 for j in order])


def min_weight_perfect_matching(
    d: DistanceMatrix, odd_set: Sequence[int]
) -> list[tuple[int, int]]:
    """Exact minimum-weight perfect matching on the given vertex indices.

    Backed by the blossom algorithm (networkx); exactness here is what
    preserves the 3/2 bound of the christofides pipeline.
    """
    odd = list(odd_set)
    if len(odd) % 2 != 0:
        raise ValueError(
            f"matching requires an even vertex set, got {len(odd)} "
            "(odd-degree set of a graph is always even; this indicates an MST bug)"
        )
    if not odd:
        return []
    if len(odd) == 2:
        return [(min(odd), max(odd))]
    g = nx.Graph()
    for a, b in itertools.combinations(sorted(odd), 2):
        g.add_edge(a, b, weight=float(d.matrix[a, b]))
    mate = nx.min_weight_matching(g)
    return sorted((min(a, b), max(a, b)) for a, b in mate)


def _mst_edges(d: DistanceMatrix) -> list[tuple[int, int]]:
    """Kruskal MST over the complete metric; ties broken by lexicographic vertex id."""
    n = d.size
    ids = d.vertices
    edges = sorted(
        (float(d.matrix[i, j]),) + ((ids[i], i, ids[j], j) if ids[i] <= ids[j] else (ids[j], j, ids[i], i))
        for i in range(n)
        for j in range(i + 1, n)
    )
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    out = []
    for _, _, i, _, j in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            out.append((i, j))
            if len(out) == n - 1:
                break
    return out


def _euler_circuit(n: int, multi_edges: list[tuple[int, int]], ids: Sequence[str]) -> list[int]:
    """Hierholzer circuit over a connected even-degree multigraph, start at index 0.

    Adjacency is traversed in lexicographic vertex-id order for determinism.
    """
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid, (a, b) in enumerate(multi_edges):
        adj[a].append((b, eid))
        adj[b].append((a, eid))
    for lst in adj:
        lst.sort(key=lambda pair: ids[pair[0]], reverse=True)  # pop() yields smallest id
    used = [False] * len(multi_edges)
    stack = [0]
    circuit: list[int] = []
    while stack:
        v = stack[-1]
        while adj[v] and used[adj[v][-1][1]]:
            adj[v].pop()
        if adj[v]:
            w, eid = adj[v].pop()
            used[eid] = True
            stack.append(w)
        else:
            circuit.append(stack.pop())
    circuit.reverse()
    return circuit


def christofides(d: DistanceMatrix) -> Tour:
    """3/2-approximate closed tour: MST + exact matching + Euler circuit + shortcut."""
    n = d.size
    if n <= 2:
        return _close_tour(d, list(range(n)))
    mst = _mst_edges(d)
    degree = [0] * n
    for a, b in mst:
        degree[a] += 1
        degree[b] += 1
    odd = [i for i in range(n) if degree[i] % 2 == 1]
    matching = min_weight_perfect_matching(d, odd)
    circuit = _euler_circuit(n, mst + matching, d.vertices)
    seen = set()
    order = []
    for v in circuit:
        if v not in seen:
            seen.add(v)
            order.append(v)
    return _close_tour(d, order)


def greedy_tour(d: DistanceMatrix) -> Tour:
    """Nearest-neighbor construction polished by 2-opt until no improving swap."""
    n = d.size
    if n <= 2:
        return _close_tour(d, list(range(n)))
    m = d.matrix
    unvisited = np.ones(n, dtype=bool)
    unvisited[0] = False
    order = [0]
    for _ in range(n - 1):
        row = np.where(unvisited, m[order[-1]], np.inf)
        nxt = int(np.argmin(row))
        unvisited[nxt] = False
        order.append(nxt)

    tour = np.array(order + [0])
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            a, b = tour[i - 1], tour[i]
            rest = tour[i + 1:]
            # delta of reversing tour[i..j] for every j > i
            deltas = m[a, rest[:-1]] + m[b, rest[1:]] - m[a, b] - m[rest[:-1], rest[1:]]
            j = int(np.argmin(deltas))
            if deltas[j] < -1e-12 * max(1.0, float(m[a, b])):
                tour[i: i + j + 2] = tour[i: i + j + 2][::-1]
                improved = True
    return _close_tour(d, [int(v) for v in tour[:-1]])


def backend_fn(backend: str, held_karp_cap: int = HELD_KARP_CAP) -> Callable[[DistanceMatrix], Tour]:
    if backend == "exact":
        return lambda d: held_karp(d, held_karp_cap)
    if backend == "christofides":
        return christofides
    if backend == "greedy":
        return greedy_tour
    raise ValueError(f"unknown TSP backend {backend!r}; expected one of {BACKENDS}")


def _rotate_to(tour: Tour, anchor: str) -> Tour:
    """Rotate a closed tour so it starts and ends at ``anchor``.

    The hop multiset is unchanged, so the stored time carries over; in
    particular identically shaped modules keep bit-identical coverage
    times no matter where their doorways sit.
    """
    if len(tour.vertices) == 1:
        return tour
    cycle = list(tour.vertices[:-1])
    i = cycle.index(anchor)
    rotated = cycle[i:] + cycle[:i] + [anchor]
    return Tour(tuple(rotated), tour.time)


def module_coverage_time(
    module: ModuleSpec,
    backend: str = "exact",
    held_karp_cap: int = HELD_KARP_CAP,
) -> tuple[float, Tour]:
    """Coverage time tau of one module and the tour anchored at its doorway.

    The TSP runs on the metric closure of the module graph (room graphs are
    sparse; the closure restores the completeness the TSP formulation
    needs), so hops in the returned tour may traverse intermediate vertices
    implicitly.
    """
    d = metric_closure(module.graph)
    if d.size == 1:
        return 0.0, Tour((module.doorway,), 0.0)
    raw = backend_fn(backend, held_karp_cap)(d)
    anchored = _rotate_to(raw, module.doorway)
    return anchored.time, anchored


def _local_id(v: str) -> str:
    """Strip the environment's per-module namespace prefix, if any."""
    return v.split("/", 1)[1] if "/" in v else v


def _module_signature(module: ModuleSpec) -> tuple:
    """Geometry key used to share TSP work between identically shaped modules.

    The doorway is deliberately excluded: rotating a closed tour to a
    different anchor does not change its time.
    """
    return (
        tuple(_local_id(v) for v in module.graph.vertices),
        tuple((_local_id(u), _local_id(v), w) for u, v, w in module.graph.edges),
    )


def coverage_costs(
    env,
    backend: str = "christofides",
    dedupe: bool = False,
    held_karp_cap: int = HELD_KARP_CAP,
) -> CoverageCostTable:
    """Coverage cost table for every module of an environment.

    With ``dedupe`` (the "base" mode of the benchmarks), the TSP runs once
    per distinct module geometry and the resulting tour is relabeled and
    re-anchored per module; otherwise every module is solved independently
    (the "agnostic" mode).
    """
    taus: list[float] = []
    tours: list[Tour] = []
    cache: dict[tuple, tuple[float, Tour]] = {}
    for idx, module in enumerate(env.modules, start=1):
        if not dedupe:
            tau, anchored = module_coverage_time(module, backend, held_karp_cap)
        else:
            sig = _module_signature(module)
            if sig not in cache:
                cache[sig] = module_coverage_time(module, backend, held_karp_cap)
            tau, cached_tour = cache[sig]
            # Relabel the cached tour into this module's namespace and rotate
            # it to this module's doorway; a rotation permutes the same hop
            # set, so the cached time carries over.
            prefix = f"m{idx}/"
            cycle = [prefix + _local_id(v) for v in cached_tour.vertices[:-1]] or [
                prefix + _local_id(cached_tour.vertices[0])
            ]
            if len(cycle) > 1:
                at = cycle.index(module.doorway)
                cycle = cycle[at:] + cycle[:at] + [module.doorway]
            anchored = Tour(tuple(cycle), tau)
        taus.append(tau)
        tours.append(anchored)
    return CoverageCostTable(tuple(taus), backend, tuple(tours))
