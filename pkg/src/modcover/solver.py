"""Optimal contiguous-block assignment of modules to robots.

``solve_integer`` computes, for m robots on an n-module chain, the
assignment of disjoint contiguous blocks of modules to robots that
minimizes the makespan, where a robot covering block [i, j] pays

    time(i, j) = sum(tau(h) for h in i..j) + 2 * prefix_link_cost(env, j).

The table f(i, j, k) holds the best makespan for k robots covering modules
i..j starting from the depot.  Two closed forms seed it:

    f(i, i, k) = tau(i) + 2 * prefix_link_cost(i)        (any k >= 1)
    f(i, j, 1) = sum(tau(i..j)) + 2 * prefix_link_cost(j)

and the general cell minimizes, over a split index h, the worse of the two
half-teams

    f(i, j, k) = min_{h in i-1..j} max(f(i, h, floor(k/2)),
                                       f(h+1, j, ceil(k/2)))

with empty intervals costing zero (h = i-1 idles the lower half-team,
h = j the upper one).  The lower arm is non-decreasing and the upper arm
non-increasing in h, so a binary search over h finds the crossover and the
true minimizer is one of the two cells around it; only the robot counts
reachable by halving m are ever materialized.  Total work is
O(n^2 log n log m).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .environment import ModularEnvironment, validate_environment
from .tsp import CoverageCostTable, Tour

Block = Optional[tuple[int, int]]

# Scaled absolute tolerance for the crossover predicate of the binary
# search; the final comparison between the two candidate cells is exact.
_CROSSOVER_TOL = 1e-12


def needed_robot_counts(m: int) -> frozenset[int]:
    """All team sizes reachable from m by repeated halving into floor/ceil.

    At most two distinct sizes appear per halving level because
    floor(ceil(k/2)/2) == ceil(floor(k/2)/2), so the set has O(log m)
    members.
    """
    if m < 1:
        raise ValueError(f"robot count must be >= 1, got {m}")
    needed: set[int] = set()
    level = {m}
    while level:
        for k in level:
            if k > 1 and k % 2 == 1:
                # distinct children recombine: floor(ceil(k/2)/2) == ceil(floor(k/2)/2)
                assert ((k + 1) // 2) // 2 == (k // 2 + 1) // 2
        needed.update(level)
        level = {h for k in level if k > 1 for h in (k // 2, (k + 1) // 2)}
        assert len(level) <= 2  # the recursive width never expands past 2
        level -= needed
    return frozenset(needed)


class SplitTable:
    """Memoized f(i, j, k) values and chosen split indices.

    Layers are dense (n+2) x (n+1) arrays indexed [i, j] with 1-based
    module indices; cells with i > j are empty intervals and read as zero.
    """

    def __init__(self, n: int, needed_ks: frozenset[int]):
        self.n = n
        self.needed_ks = needed_ks
        self._f: dict[int, np.ndarray] = {}
        self._h: dict[int, np.ndarray] = {}

    def _layer(self, k: int) -> np.ndarray:
        if k not in self._f:
            self._f[k] = np.zeros((self.n + 2, self.n + 1))
            self._h[k] = np.full((self.n + 2, self.n + 1), -1, dtype=np.int32)
        return self._f[k]

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(sorted(self._f))

    def f(self, i: int, j: int, k: int) -> float:
        """f(i, j, k); empty intervals (j < i) cost zero."""
        if j < i:
            return 0.0
        if k not in self._f:
            raise KeyError(f"robot count {k} not materialized (needed: {sorted(self._f)})")
        return float(self._f[k][i, j])

    def split(self, i: int, j: int, k: int) -> int:
        """Chosen split index h for cell (i, j, k); only stored for k >= 2."""
        h = int(self._h[k][i, j])
        if h < i - 1:
            raise KeyError(f"no split stored for ({i}, {j}, {k})")
        return h

    def cells(self) -> Iterator[tuple[int, int, int, float]]:
        """Iterate (i, j, k, f) over all stored non-empty cells."""
        for k in sorted(self._f):
            layer = self._f[k]
            for i in range(1, self.n + 1):
                for j in range(i, self.n + 1):
                    yield i, j, k, float(layer[i, j])


@dataclass(frozen=True)
class IntegerSolution:
    """Per-robot contiguous blocks (1-based, inclusive; None = idle) and times."""

    blocks: tuple[Block, ...]
    times: tuple[float, ...]
    makespan: float
    backend: str = ""

    @property
    def robots_used(self) -> int:
        return sum(1 for b in self.blocks if b is not None)

    @property
    def used_times(self) -> tuple[float, ...]:
        """Tour times of the robots with non-empty blocks."""
        return tuple(t for b, t in zip(self.blocks, self.times) if b is not None)


@dataclass(frozen=True)
class RobotTour:
    """Vertex-level closed walk of one robot, starting and ending at the depot."""

    robot: int
    vertices: tuple[str, ...]
    time: float


def _block_time_fn(env: ModularEnvironment, costs: CoverageCostTable):
    """Return time(i, j) plus the prefix-sum arrays the DP layers use.

    Reported per-robot times use an exactly rounded sum over the block
    (fsum) rather than a difference of running prefixes: equal blocks of
    equal modules then get bit-identical times, which is what makes the
    zero-distance balance property exact.  The DP itself stays on prefix
    sums for O(1) cell evaluation; the two agree to a few ulps.
    """
    tau = [float(t) for t in costs.tau]
    tau_prefix = np.concatenate(([0.0], np.cumsum(np.asarray(tau, dtype=float))))
    link_prefix = env._link_prefix

    def time_of(i: int, j: int) -> float:
        if j < i:
            return 0.0
        return math.fsum(tau[i - 1: j]) + 2.0 * float(link_prefix[j - 1])

    return time_of, tau_prefix, link_prefix


def base_costs(
    env: ModularEnvironment, costs: CoverageCostTable, needed_ks: Optional[frozenset[int]] = None
) -> SplitTable:
    """Seed a split table with the two closed-form cases.

    Fills the full one-robot layer f(i, j, 1) and the single-module
    diagonal f(i, i, k) (which is independent of k) for every needed k.
    """
    n = env.n
    if len(costs.tau) != n:
        raise ValueError(f"cost table has {len(costs.tau)} entries for {n} modules")
    if needed_ks is None:
        needed_ks = frozenset({1})
    table = SplitTable(n, needed_ks)
    _, tau_prefix, link_prefix = _block_time_fn(env, costs)

    ii = np.arange(1, n + 1)
    layer1 = table._layer(1)
    # f(i, j, 1) = (tau_prefix[j] - tau_prefix[i-1]) + 2 * link_prefix[j-1], j >= i
    block = tau_prefix[None, 1: n + 1] - tau_prefix[0: n][:, None]
    vals = block + 2.0 * link_prefix[None, 0: n]
    iu, ju = np.triu_indices(n)
    layer1[iu + 1, ju + 1] = vals[iu, ju]

    diag = layer1[ii, ii]
    for k in sorted(needed_ks):
        if k == 1:
            continue
        layer = table._layer(k)
        layer[ii, ii] = diag
    return table


def split_point(
    i: int, j: int, k: int, table: SplitTable, search: str = "binary"
) -> tuple[int, float]:
    """Best split index h in i-1..j for k robots on modules i..j, and its f-value.

    ``binary`` exploits the monotone arms: it locates the largest h whose
    lower arm does not exceed the upper arm, then compares that cell and
    the next one exactly, preferring the smaller h on a tie.  ``linear``
    inspects every h and is the reference oracle; the two agree on the
    f-value always and on h up to ties.
    """
    if k < 2:
        raise ValueError("split points are defined for k >= 2")
    lo_k, up_k = k // 2, (k + 1) // 2
    flo = table._f[lo_k]
    fup = table._f[up_k]

    def lower(h: int) -> float:
        return float(flo[i, h]) if h >= i else 0.0

    def upper(h: int) -> float:
        return float(fup[h + 1, j]) if h < j else 0.0

    if search == "linear":
        best_h, best_v = i - 1, None
        for h in range(i - 1, j + 1):
            v = max(lower(h), upper(h))
            if best_v is None or v < best_v:
                best_h, best_v = h, v
        return best_h, best_v

    if search != "binary":
        raise ValueError(f"unknown split search {search!r}")

    lo, hi = i - 1, j
    while lo < hi:
        mid = (lo + hi + 1) // 2
        l, u = lower(mid), upper(mid)
        if l <= u + _CROSSOVER_TOL * max(1.0, abs(l), abs(u)):
            lo = mid
        else:
            hi = mid - 1
    h1 = lo
    h2 = min(h1 + 1, j)
    g1 = max(lower(h1), upper(h1))
    g2 = max(lower(h2), upper(h2))
    if g2 < g1:
        return h2, g2
    return h1, g1


def _fill_layer(table: SplitTable, k: int, search: str) -> None:
    """Compute f(., ., k) for all intervals from the two child layers."""
    n = table.n
    lo_k, up_k = k // 2, (k + 1) // 2
    flo = table._f[lo_k]
    fup = table._f[up_k]
    layer = table._layer(k)
    hlayer = table._h[k]

    if search == "linear":
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                h, v = split_point(i, j, k, table, search="linear")
                layer[i, j] = v
                hlayer[i, j] = h
        return

    iu, ju = np.triu_indices(n)
    ii = iu + 1
    jj = ju + 1
    lo = ii - 1
    hi = jj.copy()
    while True:
        open_ = lo < hi
        if not np.any(open_):
            break
        mid = (lo + hi + 1) // 2
        l = flo[ii, mid]
        u = fup[mid + 1, jj]
        ok = l <= u + _CROSSOVER_TOL * np.maximum(1.0, np.maximum(np.abs(l), np.abs(u)))
        take = open_ & ok
        lo = np.where(take, mid, lo)
        hi = np.where(open_ & ~ok, mid - 1, hi)
    h1 = lo
    h2 = np.minimum(h1 + 1, jj)
    g1 = np.maximum(flo[ii, h1], fup[h1 + 1, jj])
    g2 = np.maximum(flo[ii, h2], fup[h2 + 1, jj])
    use2 = g2 < g1
    layer[ii, jj] = np.where(use2, g2, g1)
    hlayer[ii, jj] = np.where(use2, h2, h1)


def build_split_table(
    env: ModularEnvironment,
    costs: CoverageCostTable,
    m: int,
    search: str = "binary",
    k_layers: str = "halving",
) -> SplitTable:
    """Materialize every layer needed to split m robots over the whole chain.

    ``k_layers="halving"`` (the default) computes only the robot counts
    reachable by halving from m; ``"all"`` computes every k up to
    ceil(m/2) plus the top layer, which is the plain loop formulation kept
    as a cross-check mode.  Both must produce identical tables on shared
    layers.
    """
    if k_layers == "halving":
        needed = needed_robot_counts(m)
    elif k_layers == "all":
        needed = frozenset(range(1, (m + 1) // 2 + 1)) | {m} if m > 1 else frozenset({1})
    else:
        raise ValueError(f"unknown k_layers mode {k_layers!r}")
    table = base_costs(env, costs, needed)
    for k in sorted(needed):
        if k > 1:
            _fill_layer(table, k, search)
    return table


def _descend_blocks(table: SplitTable, i: int, j: int, k: int, out: list[Block]) -> None:
    if j < i:
        out.extend([None] * k)
    elif k == 1:
        out.append((i, j))
    else:
        h = table.split(i, j, k)
        _descend_blocks(table, i, h, k // 2, out)
        _descend_blocks(table, h + 1, j, (k + 1) // 2, out)


def solve_integer(
    env: ModularEnvironment,
    costs: CoverageCostTable,
    m: int,
    search: str = "binary",
    k_layers: str = "halving",
    validate: bool = True,
) -> tuple[IntegerSolution, SplitTable]:
    """Best integer solution: contiguous blocks for m robots minimizing the makespan.

    The robot count is clamped to n internally (extra robots cannot help
    when every robot covers whole modules); the returned solution still
    lists all m robots, the surplus ones idle.  The descent assigns the
    lower floor(k/2) robots of each split to the lower interval; any
    optimal contiguous partition is reachable through such balanced splits
    (cut after the floor(k/2)-th block), so no optimality is lost.
    """
    if m < 1:
        raise ValueError(f"robot count must be >= 1, got {m}")
    if validate:
        violations = validate_environment(env)
        if violations:
            raise ValueError("invalid environment: " + "; ".join(violations))
    n = env.n
    m_eff = min(m, n)
    table = build_split_table(env, costs, m_eff, search=search, k_layers=k_layers)

    blocks: list[Block] = []
    _descend_blocks(table, 1, n, m_eff, blocks)
    blocks.extend([None] * (m - m_eff))

    time_of, _, _ = _block_time_fn(env, costs)
    times = tuple(time_of(*b) if b is not None else 0.0 for b in blocks)
    solution = IntegerSolution(
        blocks=tuple(blocks),
        times=times,
        makespan=max(times),
        backend=costs.backend,
    )
    return solution, table


def solution_makespan(solution: IntegerSolution) -> float:
    """Recompute the makespan as the maximum per-robot time."""
    return max(solution.times) if solution.times else 0.0


def block_time(env: ModularEnvironment, costs: CoverageCostTable, i: int, j: int) -> float:
    """Tour time of one robot covering modules i..j (1-based, inclusive)."""
    time_of, _, _ = _block_time_fn(env, costs)
    return time_of(i, j)


def build_robot_tours(
    env: ModularEnvironment,
    solution: IntegerSolution,
    module_tours: Sequence[Tour],
) -> list[RobotTour]:
    """Expand block assignments into vertex-level closed walks from the depot.

    A robot assigned [i, j] rides the linking chain to d_i, covers each
    module of its block in ascending order via that module's anchored tour,
    hops doorway to doorway between consecutive modules, and rides the
    chain back from d_j.  On a linear linking structure any within-block
    order costs the same; ascending order is fixed for determinism.
    """
    if len(module_tours) != env.n:
        raise ValueError(f"need one anchored tour per module, got {len(module_tours)} for n={env.n}")
    out: list[RobotTour] = []
    depot = env.depot
    for r, block in enumerate(solution.blocks, start=1):
        if block is None:
            out.append(RobotTour(r, (depot,), 0.0))
            continue
        i, j = block
        walk: list[str] = [env.doorway(h) for h in range(1, i + 1)]
        for h in range(i, j + 1):
            anchored = module_tours[h - 1]
            if anchored is None:
                raise ValueError(f"missing anchored tour for module {h}")
            if anchored.vertices[0] != env.doorway(h):
                raise ValueError(
                    f"module {h} tour is anchored at {anchored.vertices[0]!r}, "
                    f"expected doorway {env.doorway(h)!r}"
                )
            walk.extend(anchored.vertices[1:])
            if h < j:
                walk.append(env.doorway(h + 1))
        walk.extend(env.doorway(h) for h in range(j - 1, 0, -1))
        out.append(RobotTour(r, tuple(walk), solution.times[r - 1]))
    return out


# --- solution file format -----------------------------------------------
#
# { "algorithm": "integer" | "frederickson",
#   "backend": str,
#   "makespan": num,
#   "robots": [ { "robot": int, "block": [i, j] | null,
#                 "time": num, "tour": [vertex-id, ...] | null } ] }


def solution_to_dict(
    solution,
    algorithm: str,
    tours: Optional[Sequence] = None,
) -> dict:
    robots = []
    if isinstance(solution, IntegerSolution):
        walks = {t.robot: list(t.vertices) for t in tours} if tours else {}
        for r, (block, t) in enumerate(zip(solution.blocks, solution.times), start=1):
            robots.append(
                {
                    "robot": r,
                    "block": list(block) if block is not None else None,
                    "time": t,
                    "tour": walks.get(r),
                }
            )
    else:  # multi-tour solutions carry walks, not blocks
        for r, (walk, t) in enumerate(zip(solution.walks, solution.times), start=1):
            robots.append({"robot": r, "block": None, "time": t, "tour": list(walk)})
    return {
        "algorithm": algorithm,
        "backend": solution.backend,
        "makespan": solution.makespan,
        "robots": robots,
    }


def save_solution(solution, path, algorithm: str = "integer", tours=None) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(solution_to_dict(solution, algorithm, tours), f, indent=1)
        f.write("\n")


def load_solution(path) -> dict:
    """Load a solution file back into its dictionary form (schema above)."""
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    for key in ("algorithm", "backend", "makespan", "robots"):
        if key not in doc:
            raise ValueError(f"solution file {path}: missing field {key!r}")
    return doc
