"""Seeded generators for synthetic modular environments.

Three base-module topologies mirror the benchmark floors: a ring of rooms
(type A), a star of rooms around a central corridor (type B), and a
corridor of rooms in a line (type C).  Room centroids connect to portals
with Euclidean travel time; portals sharing a room connect with the L1
norm.  The default templates are calibrated so that, under the
christofides backend, the three coverage times land near 198 / 347 / 438
meter-seconds with vertex counts near 40 / 47 / 80.

Composition patterns build an environment from the templates: identical
(one template repeated), random (uniform iid choice), and increasing /
decreasing size ramps in thirds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .environment import MetricGraph, ModularEnvironment, ModuleSpec

TOPOLOGIES = ("ring", "star", "corridor")
PATTERNS = ("identical", "random", "increasing", "decreasing")

# Pitch constants (meters per room at scale 1), tuned against the target
# coverage times; door width 0.8 m sets the lateral jitter scale.
_RING_PITCH = 9.9
_STAR_SPOKE = 3.75
_CORRIDOR_PITCH = 5.6
_DOOR_WIDTH = 0.8


@dataclass(frozen=True)
class ModuleTemplate:
    """Recipe for one module: topology, size, scale, and geometry seed."""

    topology: str
    rooms: int
    scale: float = 1.0
    seed: int = 0


@dataclass(frozen=True)
class PatternSpec:
    """Recipe for a whole environment: pattern, length, doorway spacing, seed."""

    pattern: str
    n: int
    link_dist: float
    seed: int = 0


def _euclid(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def _l1(a, b) -> float:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _ring_geometry(rooms: int, scale: float, rng) -> tuple[dict, list]:
    radius = rooms * _RING_PITCH * scale / (2 * math.pi)
    coords: dict[str, tuple[float, float]] = {}
    edges: list[tuple[str, str, float]] = []
    for i in range(rooms):
        theta = 2 * math.pi * (i + rng.uniform(-0.12, 0.12)) / rooms
        rho = radius * (1 + rng.uniform(-0.06, 0.06))
        coords[f"r{i}"] = (rho * math.cos(theta), rho * math.sin(theta))
    for i in range(rooms):
        theta = 2 * math.pi * (i + 0.5 + rng.uniform(-0.08, 0.08)) / rooms
        rho = radius * (1 + rng.uniform(-0.04, 0.04))
        coords[f"p{i}"] = (rho * math.cos(theta), rho * math.sin(theta))
    for i in range(rooms):
        nxt = (i + 1) % rooms
        edges.append((f"r{i}", f"p{i}", _euclid(coords[f"r{i}"], coords[f"p{i}"])))
        edges.append((f"p{i}", f"r{nxt}", _euclid(coords[f"p{i}"], coords[f"r{nxt}"])))
        # the two portals of room i lie on its opposite walls
        prev = (i - 1) % rooms
        if rooms > 2 or i == 0:
            edges.append((f"p{prev}", f"p{i}", _l1(coords[f"p{prev}"], coords[f"p{i}"])))
    return coords, edges


def _star_geometry(rooms: int, scale: float, rng) -> tuple[dict, list]:
    coords: dict[str, tuple[float, float]] = {"c": (0.0, 0.0)}
    edges: list[tuple[str, str, float]] = []
    for i in range(rooms):
        theta = 2 * math.pi * i / rooms + rng.uniform(-0.1, 0.1)
        rho = _STAR_SPOKE * scale * (1 + rng.uniform(-0.3, 0.3))
        coords[f"r{i}"] = (rho * math.cos(theta), rho * math.sin(theta))
        edges.append(("c", f"r{i}", _euclid(coords["c"], coords[f"r{i}"])))
    return coords, edges


def _corridor_geometry(rooms: int, scale: float, rng) -> tuple[dict, list]:
    coords: dict[str, tuple[float, float]] = {}
    edges: list[tuple[str, str, float]] = []
    x = 0.0
    for i in range(rooms):
        coords[f"r{i}"] = (x, rng.uniform(-_DOOR_WIDTH, _DOOR_WIDTH))
        x += _CORRIDOR_PITCH * scale * (1 + rng.uniform(-0.15, 0.15))
    for i in range(rooms - 1):
        a, b = coords[f"r{i}"], coords[f"r{i + 1}"]
        coords[f"p{i}"] = ((a[0] + b[0]) / 2, rng.uniform(-_DOOR_WIDTH, _DOOR_WIDTH) / 2)
        edges.append((f"r{i}", f"p{i}", _euclid(a, coords[f"p{i}"])))
        edges.append((f"p{i}", f"r{i + 1}", _euclid(coords[f"p{i}"], b)))
        if i > 0:  # interior room i has a portal on each side
            edges.append((f"p{i - 1}", f"p{i}", _l1(coords[f"p{i - 1}"], coords[f"p{i}"])))
    return coords, edges


def make_module(template: ModuleTemplate, rng: Optional[np.random.Generator] = None) -> ModuleSpec:
    """Generate one module from a template.

    Geometry is a pure function of the template seed.  The doorway is
    drawn among the room centroids from ``rng`` when given (environment
    generation passes its own stream so doorway placement varies per
    instance), otherwise from the template seed.
    """
    if template.topology not in TOPOLOGIES:
        raise ValueError(f"unknown topology {template.topology!r}; expected one of {TOPOLOGIES}")
    if template.rooms < 1:
        raise ValueError(f"room count must be >= 1, got {template.rooms}")
    if template.scale <= 0:
        raise ValueError(f"scale must be positive, got {template.scale}")
    geo_rng = np.random.default_rng(template.seed)

    if template.rooms == 1 and template.topology in ("ring", "corridor"):
        coords, edges = {"r0": (0.0, 0.0)}, []
    elif template.topology == "ring":
        coords, edges = _ring_geometry(template.rooms, template.scale, geo_rng)
    elif template.topology == "star":
        coords, edges = _star_geometry(template.rooms, template.scale, geo_rng)
    else:
        coords, edges = _corridor_geometry(template.rooms, template.scale, geo_rng)

    graph = MetricGraph(tuple(coords), tuple(edges), coords)
    centroids = sorted(v for v in graph.vertices if v.startswith("r"))
    draw = rng if rng is not None else geo_rng
    doorway = centroids[int(draw.integers(len(centroids)))]
    return ModuleSpec(graph, doorway)


DEFAULT_TEMPLATES: Mapping[str, ModuleTemplate] = {
    "A": ModuleTemplate("ring", rooms=20, seed=101),
    "B": ModuleTemplate("star", rooms=46, seed=102),
    "C": ModuleTemplate("corridor", rooms=40, seed=103),
}


def scaled_templates(factor: float, seed: int = 100) -> dict[str, ModuleTemplate]:
    """Proportionally shrunken analogues of the default templates.

    Room counts scale with ``factor`` (1.0 reproduces the default sizes) in
    a way that keeps the coverage-time ordering A < B < C intact, so the
    increasing/decreasing patterns stay meaningful on desk-scale instances.
    """
    if factor <= 0:
        raise ValueError(f"factor must be positive, got {factor}")
    return {
        "A": ModuleTemplate("ring", rooms=max(2, round(20 * factor)), seed=seed + 1),
        "B": ModuleTemplate("star", rooms=max(3, round(46 * factor)), seed=seed + 2),
        "C": ModuleTemplate("corridor", rooms=max(3, round(40 * factor) + 1), seed=seed + 3),
    }


def _type_sequence(pattern: str, n: int, rng) -> list[str]:
    if pattern == "random":
        return [("A", "B", "C")[int(rng.integers(3))] for _ in range(n)]
    third = n // 3
    if pattern == "decreasing":
        # biggest modules first; any remainder joins the last segment
        return ["C"] * third + ["B"] * third + ["A"] * (n - 2 * third)
    if pattern == "increasing":
        return ["A"] * third + ["B"] * third + ["C"] * (n - 2 * third)
    raise ValueError(f"unknown pattern {pattern!r}; expected one of {PATTERNS}")


def make_environment(
    spec: PatternSpec,
    templates: Union[ModuleTemplate, Mapping[str, ModuleTemplate]] = DEFAULT_TEMPLATES,
) -> ModularEnvironment:
    """Compose a modular environment per the pattern spec.

    ``identical`` repeats a single template n times; the other patterns
    require templates keyed "A", "B", "C".  All linking weights equal
    ``spec.link_dist``.
    """
    if spec.n < 1:
        raise ValueError(f"module count must be >= 1, got {spec.n}")
    if spec.link_dist < 0:
        raise ValueError(f"doorway distance must be >= 0, got {spec.link_dist}")
    rng = np.random.default_rng(spec.seed)

    if spec.pattern == "identical":
        if isinstance(templates, ModuleTemplate):
            base = templates
        elif len(templates) == 1:
            base = next(iter(templates.values()))
        else:
            raise ValueError("identical pattern needs exactly one template")
        sequence = [base] * spec.n
    else:
        if isinstance(templates, ModuleTemplate) or not {"A", "B", "C"} <= set(templates):
            raise ValueError(f"pattern {spec.pattern!r} needs templates keyed 'A', 'B', 'C'")
        sequence = [templates[t] for t in _type_sequence(spec.pattern, spec.n, rng)]

    modules = tuple(make_module(t, rng=rng) for t in sequence)
    linking = (float(spec.link_dist),) * (spec.n - 1)
    name = f"{spec.pattern}-n{spec.n}-link{spec.link_dist:g}-seed{spec.seed}"
    return ModularEnvironment(modules, linking, name)
