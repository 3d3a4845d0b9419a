#!/usr/bin/env python3
"""The split-point dynamic program for optimal contiguous-block assignment.

A robot covering modules i..j pays their coverage times plus twice the
linking chain out to doorway j.  The solver finds blocks minimizing the
longest robot tour by recursively splitting the robot team in halves, and
only ever materializes O(log m) team sizes.

The classic saturation effect: on a 30-module chain of identical modules
(coverage 347, doorway spacing 20), no solution can beat the time to
reach, cover, and return from the last module: 2 * 580 + 347 = 1507.
Eighteen robots suffice to hit that floor, so extra robots idle.
"""

from modcover import (
    CoverageCostTable,
    MetricGraph,
    ModularEnvironment,
    ModuleSpec,
    build_robot_tours,
    coverage_costs,
    needed_robot_counts,
    solve_integer,
)


def cost_only_environment(taus, links):
    mods = tuple(ModuleSpec(MetricGraph(("v",), ()), "v") for _ in taus)
    return ModularEnvironment(mods, links), CoverageCostTable(tuple(taus), "exact")


# --- halving keeps the table small -------------------------------------------

for m in (10, 20, 100):
    print(f"robot counts materialized for m={m}: {sorted(needed_robot_counts(m))}")

# --- saturation on the identical chain ----------------------------------------

env, costs = cost_only_environment((347.0,) * 30, (20.0,) * 29)
print("\n m  makespan  robots used")
for m in (5, 10, 17, 18, 19, 25, 30):
    sol, _ = solve_integer(env, costs, m)
    print(f"{m:3d}  {sol.makespan:8.1f}  {sol.robots_used:3d}")

sol18, table = solve_integer(env, costs, 18)
print("\nblocks at m=18 (modules near the depot come in big chunks):")
print([b for b in sol18.blocks if b is not None])

# --- from blocks to vertex-level walks -----------------------------------------

g = MetricGraph(("hall", "room1", "room2"),
                (("hall", "room1", 2.0), ("hall", "room2", 3.0)))
env2 = ModularEnvironment(
    (ModuleSpec(g, "hall"), ModuleSpec(g, "hall"), ModuleSpec(g, "hall")),
    (4.0, 4.0),
)
costs2 = coverage_costs(env2, backend="exact")
sol2, _ = solve_integer(env2, costs2, 2)
print(f"\n3 real modules, 2 robots: blocks {sol2.blocks}, makespan {sol2.makespan}")
for tour in build_robot_tours(env2, sol2, costs2.tours):
    print(f"  robot {tour.robot}: time {tour.time:5.1f}  walk {' -> '.join(tour.vertices)}")
