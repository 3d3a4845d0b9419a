#!/usr/bin/env python3
"""The three single-module TSP backends and what each guarantees.

* exact (Held-Karp): optimal, exponential, capped at 15 vertices;
* christofides: at most 1.5x optimal, polynomial, exact blossom matching;
* greedy: nearest neighbor + 2-opt, fast, no guarantee.

Coverage time tau(i) of a module is the time of a closed tour over its
metric closure, anchored at the doorway.
"""

import numpy as np

from modcover import (
    ModuleTemplate,
    christofides,
    greedy_tour,
    held_karp,
    make_module,
    metric_closure,
    min_weight_perfect_matching,
    module_coverage_time,
)

rng = np.random.default_rng(7)

# --- one synthetic module, three backends -----------------------------------

module = make_module(ModuleTemplate("ring", rooms=6, seed=42))
d = metric_closure(module.graph)
print(f"ring module: {d.size} vertices, doorway {module.doorway}")

for name, backend in (("exact", held_karp), ("christofides", christofides), ("greedy", greedy_tour)):
    tour = backend(d)
    print(f"  {name:13s} tour time {tour.time:8.2f}")

opt = held_karp(d).time
assert christofides(d).time <= 1.5 * opt
assert greedy_tour(d).time >= opt

# --- anchored coverage time ---------------------------------------------------

tau, anchored = module_coverage_time(module, backend="christofides")
print(f"coverage time tau = {tau:.2f}, tour starts/ends at {anchored.vertices[0]}")

# --- the matching that keeps christofides honest ------------------------------

pts = rng.random((8, 2)) * 50
m = np.hypot(pts[:, None, 0] - pts[None, :, 0], pts[:, None, 1] - pts[None, :, 1])
from modcover import DistanceMatrix

dm = DistanceMatrix(tuple(f"v{i}" for i in range(8)), m)
pairs = min_weight_perfect_matching(dm, list(range(8)))
weight = sum(dm.matrix[a, b] for a, b in pairs)
print(f"blossom matching on 8 points: pairs {pairs}, weight {weight:.2f}")

# the greedy alternative (pair closest first) is generally heavier:
left = set(range(8))
greedy_weight = 0.0
while left:
    a = min(left)
    left.remove(a)
    b = min(left, key=lambda x: dm.matrix[a, x])
    left.remove(b)
    greedy_weight += dm.matrix[a, b]
print(f"greedy pairing weight: {greedy_weight:.2f}  (>= exact, {greedy_weight / weight:.2f}x)")
