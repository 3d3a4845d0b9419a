"""Linear modular environments: module graphs, metrics, and the environment file format.

A modular environment is an ordered chain of modules G_1..G_n, each a small
weighted room graph with a designated doorway vertex d_i.  Consecutive
doorways are joined by a linking edge of non-negative travel time; d_1 is
the depot every robot tour starts from and returns to.

All travel times are double-precision seconds (robots move at constant
speed, so meters and seconds are interchangeable up to a factor).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


class EnvironmentFormatError(ValueError):
    """Raised when an environment file does not match the documented schema."""


@dataclass(frozen=True)
class MetricGraph:
    """Undirected weighted graph with string vertex ids and optional 2-D coordinates.

    Vertices and edges are canonicalized (sorted, endpoints ordered) at
    construction so that structurally equal graphs compare equal and all
    derived orderings are deterministic.
    """

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    coords: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        verts = tuple(sorted(str(v) for v in self.vertices))
        edges = tuple(
            sorted(
                (min(str(u), str(v)), max(str(u), str(v)), float(w))
                for (u, v, w) in self.edges
            )
        )
        coords = {str(v): (float(x), float(y)) for v, (x, y) in dict(self.coords).items()}
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "coords", coords)

    def __eq__(self, other):
        if not isinstance(other, MetricGraph):
            return NotImplemented
        return (
            self.vertices == other.vertices
            and self.edges == other.edges
            and self.coords == other.coords
        )

    @property
    def size(self) -> int:
        return len(self.vertices)

    def relabel(self, prefix: str) -> "MetricGraph":
        """Return a copy with every vertex id prefixed by ``prefix``."""
        return MetricGraph(
            vertices=tuple(prefix + v for v in self.vertices),
            edges=tuple((prefix + u, prefix + v, w) for (u, v, w) in self.edges),
            coords={prefix + v: xy for v, xy in self.coords.items()},
        )

    def violations(self, *, positive_weights: bool = True) -> list[str]:
        """Report all invariant violations (empty list means valid)."""
        out: list[str] = []
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            out.append("duplicate vertex ids")
        seen_pairs = set()
        for u, v, w in self.edges:
            if u == v:
                out.append(f"self-loop at {u!r}")
            if u not in vset or v not in vset:
                out.append(f"edge ({u!r}, {v!r}) references unknown vertex")
            if (u, v) in seen_pairs:
                out.append(f"duplicate edge ({u!r}, {v!r})")
            seen_pairs.add((u, v))
            if not math.isfinite(w):
                out.append(f"edge ({u!r}, {v!r}) has non-finite weight {w!r}")
            elif positive_weights and w <= 0:
                out.append(f"edge ({u!r}, {v!r}) has non-positive weight {w!r}")
            elif w < 0:
                out.append(f"edge ({u!r}, {v!r}) has negative weight {w!r}")
        if self.vertices and not self.is_connected():
            out.append("graph is disconnected")
        return out

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        index = {v: i for i, v in enumerate(self.vertices)}
        adj: list[list[int]] = [[] for _ in self.vertices]
        for u, v, _ in self.edges:
            if u in index and v in index and u != v:
                adj[index[u]].append(index[v])
                adj[index[v]].append(index[u])
        seen = {0}
        stack = [0]
        while stack:
            i = stack.pop()
            for j in adj[i]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == len(self.vertices)


@dataclass(eq=False)
class DistanceMatrix:
    """All-pairs shortest-path travel times over a fixed vertex ordering."""

    vertices: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        self.vertices = tuple(self.vertices)
        self.matrix = np.asarray(self.matrix, dtype=float)
        self._index = {v: i for i, v in enumerate(self.vertices)}

    @property
    def size(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        return self._index[v]

    def d(self, u: str, v: str) -> float:
        return float(self.matrix[self._index[u], self._index[v]])

    def violations(self, *, tol: float = 1e-9) -> list[str]:
        """Check symmetry, zero diagonal, positivity, and the triangle inequality."""
        out: list[str] = []
        m = self.matrix
        if m.shape != (self.size, self.size):
            return [f"matrix shape {m.shape} does not match vertex count {self.size}"]
        if not np.allclose(m, m.T, rtol=tol, atol=0):
            out.append("matrix is not symmetric")
        if np.any(np.diag(m) != 0):
            out.append("diagonal is not zero")
        off = m + np.eye(self.size)
        if np.any(off <= 0):
            out.append("off-diagonal entry not positive")
        # d(u, w) <= d(u, v) + d(v, w) for all triples
        via = (m[:, :, None] + m[None, :, :]).min(axis=1)
        if np.any(m - via > tol * np.maximum(1.0, np.abs(m))):
            out.append("triangle inequality violated")
        return out


def metric_closure(g: MetricGraph) -> DistanceMatrix:
    """Shortest-path closure of a connected weighted graph.

    Raises ValueError if the graph is disconnected (some pair would have
    infinite travel time).
    """
    n = g.size
    if n == 0:
        raise ValueError("cannot build the metric closure of an empty graph")
    index = {v: i for i, v in enumerate(g.vertices)}
    rows, cols, vals = [], [], []
    for u, v, w in g.edges:
        i, j = index[u], index[v]
        rows += [i, j]
        cols += [j, i]
        vals += [w, w]
    sparse = csr_matrix((vals, (rows, cols)), shape=(n, n))
    dist = shortest_path(sparse, method="D", directed=False)
    if np.any(np.isinf(dist)):
        raise ValueError("graph is disconnected; metric closure undefined")
    np.fill_diagonal(dist, 0.0)
    return DistanceMatrix(g.vertices, dist)


@dataclass(frozen=True)
class ModuleSpec:
    """One module: its room graph and the doorway vertex attached to the linking chain."""

    graph: MetricGraph
    doorway: str

    def relabel(self, prefix: str) -> "ModuleSpec":
        return ModuleSpec(self.graph.relabel(prefix), prefix + self.doorway)


def _module_prefix(i: int) -> str:
    """Namespace prefix for module ``i`` (1-based)."""
    return f"m{i}/"


@dataclass(frozen=True)
class ModularEnvironment:
    """An ordered chain of modules with doorway-to-doorway linking weights.

    Vertex ids are namespaced per module ("m3/v7") at construction, which
    makes the disjointness of module vertex sets mechanical.  ``linking[i]``
    is the travel time between the doorways of modules i+1 and i+2
    (zero-indexed list, 1-based modules).  The depot is the doorway of
    module 1.
    """

    modules: tuple[ModuleSpec, ...]
    linking: tuple[float, ...]
    name: str = ""

    def __post_init__(self):
        namespaced = tuple(
            mod.relabel(_module_prefix(i + 1)) for i, mod in enumerate(self.modules)
        )
        object.__setattr__(self, "modules", namespaced)
        object.__setattr__(self, "linking", tuple(float(w) for w in self.linking))

    @property
    def n(self) -> int:
        return len(self.modules)

    def doorway(self, i: int) -> str:
        """Namespaced doorway id of module ``i`` (1-based)."""
        if not 1 <= i <= self.n:
            raise IndexError(f"module index {i} out of range [1, {self.n}]")
        return self.modules[i - 1].doorway

    @property
    def depot(self) -> str:
        return self.doorway(1)

    @cached_property
    def _link_prefix(self) -> np.ndarray:
        # _link_prefix[i] = sum of the first i linking weights
        return np.concatenate(([0.0], np.cumsum(np.asarray(self.linking, dtype=float))))


def prefix_link_cost(env: ModularEnvironment, i: int) -> float:
    """Travel time from the depot to the doorway of module ``i`` along the chain.

    Returns sum(t(d_h, d_{h+1}) for h in 1..i-1); zero for i = 1.  O(1)
    after a cached O(n) prefix-sum setup.
    """
    if not 1 <= i <= env.n:
        raise IndexError(f"module index {i} out of range [1, {env.n}]")
    return float(env._link_prefix[i - 1])


def delta_index(env: ModularEnvironment, costs) -> float:
    """Shape index of the environment: max module coverage time over total linking length.

    Wide environments (short linking chain, large modules) have large delta;
    deep environments have delta near zero.  When the linking sum is zero or
    there is a single module, returns +inf as the documented "wide limit"
    sentinel.
    """
    tau = np.asarray(costs.tau, dtype=float)
    if len(tau) != env.n:
        raise ValueError(f"cost table has {len(tau)} entries for {env.n} modules")
    total = float(np.sum(env.linking))
    if env.n == 1 or total == 0.0:
        return math.inf
    return float(np.max(tau)) / total


def validate_environment(env: ModularEnvironment) -> list[str]:
    """Report every invariant violation of the environment (empty list = valid)."""
    out: list[str] = []
    if env.n < 1:
        out.append("environment has no modules")
    if len(env.linking) != max(env.n - 1, 0):
        out.append(
            f"linking has {len(env.linking)} entries, expected {max(env.n - 1, 0)}"
        )
    for k, w in enumerate(env.linking):
        if not math.isfinite(w) or w < 0:
            out.append(f"linking[{k}] = {w!r} is not a finite non-negative time")
    seen: set[str] = set()
    for i, mod in enumerate(env.modules, start=1):
        for msg in mod.graph.violations():
            if "disconnected" in msg:
                out.append(f"module {i} disconnected")
            else:
                out.append(f"module {i}: {msg}")
        if mod.doorway not in set(mod.graph.vertices):
            out.append(f"module {i}: doorway {mod.doorway!r} is not a vertex")
        overlap = seen.intersection(mod.graph.vertices)
        if overlap:
            out.append(f"module {i}: vertex ids overlap earlier modules: {sorted(overlap)}")
        seen.update(mod.graph.vertices)
    return out


# --- environment file format ------------------------------------------------
#
# { "name": str,
#   "modules": [ { "id": int, "doorway": vertex-id,
#                  "vertices": [ {"id": str, "x": num?, "y": num?} ],
#                  "edges": [ {"u": str, "v": str, "w": num} ] } ],
#   "linking": [ num, ... ] }     # length n-1
#
# Field names are normative; unknown fields are rejected.  Vertex ids in the
# file are module-local (the "mK/" namespace is added on load and stripped
# on save), so the round trip save -> load is the identity.


def _reject_unknown(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise EnvironmentFormatError(f"{where}: unknown field(s) {sorted(unknown)}")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise EnvironmentFormatError(f"{where}: missing field {key!r}")
    return obj[key]


def _strip_prefix(v: str, prefix: str) -> str:
    return v[len(prefix):] if v.startswith(prefix) else v


def environment_to_dict(env: ModularEnvironment) -> dict:
    modules = []
    for i, mod in enumerate(env.modules, start=1):
        prefix = _module_prefix(i)
        verts = []
        for v in mod.graph.vertices:
            entry: dict = {"id": _strip_prefix(v, prefix)}
            if v in mod.graph.coords:
                x, y = mod.graph.coords[v]
                entry["x"] = x
                entry["y"] = y
            verts.append(entry)
        edges = [
            {"u": _strip_prefix(u, prefix), "v": _strip_prefix(v, prefix), "w": w}
            for (u, v, w) in mod.graph.edges
        ]
        modules.append(
            {
                "id": i,
                "doorway": _strip_prefix(mod.doorway, prefix),
                "vertices": verts,
                "edges": edges,
            }
        )
    return {"name": env.name, "modules": modules, "linking": list(env.linking)}


def environment_from_dict(doc: dict) -> ModularEnvironment:
    if not isinstance(doc, dict):
        raise EnvironmentFormatError("top level: expected an object")
    _reject_unknown(doc, {"name", "modules", "linking"}, "top level")
    name = _require(doc, "name", "top level")
    raw_modules = _require(doc, "modules", "top level")
    raw_linking = _require(doc, "linking", "top level")
    if not isinstance(name, str):
        raise EnvironmentFormatError("top level: 'name' must be a string")
    if not isinstance(raw_modules, list):
        raise EnvironmentFormatError("top level: 'modules' must be an array")
    if not isinstance(raw_linking, list):
        raise EnvironmentFormatError("top level: 'linking' must be an array")

    modules = []
    for k, rm in enumerate(raw_modules):
        where = f"modules[{k}]"
        if not isinstance(rm, dict):
            raise EnvironmentFormatError(f"{where}: expected an object")
        _reject_unknown(rm, {"id", "doorway", "vertices", "edges"}, where)
        mid = _require(rm, "id", where)
        if mid != k + 1:
            raise EnvironmentFormatError(f"{where}: id {mid!r}, expected {k + 1}")
        doorway = _require(rm, "doorway", where)
        verts, coords = [], {}
        for vk, rv in enumerate(_require(rm, "vertices", where)):
            vwhere = f"{where}.vertices[{vk}]"
            if not isinstance(rv, dict):
                raise EnvironmentFormatError(f"{vwhere}: expected an object")
            _reject_unknown(rv, {"id", "x", "y"}, vwhere)
            vid = _require(rv, "id", vwhere)
            if not isinstance(vid, str):
                raise EnvironmentFormatError(f"{vwhere}: 'id' must be a string")
            verts.append(vid)
            if ("x" in rv) != ("y" in rv):
                raise EnvironmentFormatError(f"{vwhere}: 'x' and 'y' must appear together")
            if "x" in rv:
                coords[vid] = (float(rv["x"]), float(rv["y"]))
        edges = []
        for ek, re_ in enumerate(_require(rm, "edges", where)):
            ewhere = f"{where}.edges[{ek}]"
            if not isinstance(re_, dict):
                raise EnvironmentFormatError(f"{ewhere}: expected an object")
            _reject_unknown(re_, {"u", "v", "w"}, ewhere)
            u = _require(re_, "u", ewhere)
            v = _require(re_, "v", ewhere)
            w = _require(re_, "w", ewhere)
            if not isinstance(w, (int, float)) or isinstance(w, bool):
                raise EnvironmentFormatError(f"{ewhere}: 'w' must be a number")
            edges.append((u, v, float(w)))
        modules.append(ModuleSpec(MetricGraph(tuple(verts), tuple(edges), coords), doorway))

    for k, w in enumerate(raw_linking):
        if not isinstance(w, (int, float)) or isinstance(w, bool):
            raise EnvironmentFormatError(f"linking[{k}]: expected a number")
    return ModularEnvironment(tuple(modules), tuple(float(w) for w in raw_linking), name)


def save_environment(env: ModularEnvironment, path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(environment_to_dict(env), f, indent=1)
        f.write("\n")


def load_environment(path) -> ModularEnvironment:
    with open(path, "r", encoding="utf-8") as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise EnvironmentFormatError(
                f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
    return environment_from_dict(doc)
