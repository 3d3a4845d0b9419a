#!/usr/bin/env python3
"""Baselines and oracles: tour splitting, exhaustive partitions, tiny optima.

Frederickson's heuristic solves one TSP over the whole glued environment
and cuts the tour into m depot-anchored pieces.  It ignores the modular
structure, which costs it twice: the global TSP is much more expensive to
compute, and the cuts balance distance along the tour rather than robot
workload from the depot.
"""

import time

from modcover import (
    PatternSpec,
    brute_force_contiguous,
    brute_force_mtsp_tiny,
    coverage_costs,
    delta_index,
    frederickson,
    glue_environment,
    make_environment,
    scaled_templates,
    solve_integer,
)

# --- integer solver vs tour splitting on a mid-size instance -----------------

templates = scaled_templates(0.1)
env = make_environment(PatternSpec("random", 40, 2.0, seed=9), templates)
glued = glue_environment(env)
print(f"environment: {env.n} modules, {glued.graph.size} vertices glued")

t0 = time.perf_counter()
costs = coverage_costs(env, backend="christofides")
sol, _ = solve_integer(env, costs, 8)
t_int = time.perf_counter() - t0

t0 = time.perf_counter()
fred = frederickson(env, 8, tsp_backend="christofides")
t_fred = time.perf_counter() - t0

print(f"integer:      makespan {sol.makespan:7.1f}   {t_int:6.2f}s")
print(f"frederickson: makespan {fred.makespan:7.1f}   {t_fred:6.2f}s  ({t_fred / t_int:.0f}x slower)")

# --- oracles ground the solver on small instances ------------------------------

env_small = make_environment(PatternSpec("random", 8, 3.0, seed=4), templates)
costs_small = coverage_costs(env_small, backend="exact")
sol_small, _ = solve_integer(env_small, costs_small, 3)
oracle = brute_force_contiguous(env_small, costs_small, 3)
print(f"\nn=8, m=3: solver {sol_small.makespan:.3f} == oracle {oracle.makespan:.3f}")

# --- the approximation bound, checked against the true optimum -----------------

tiny = make_environment(PatternSpec("identical", 2, 2.0, seed=3),
                        scaled_templates(0.06)["B"])
tiny_costs = coverage_costs(tiny, backend="exact")
delta = delta_index(tiny, tiny_costs)
opt = brute_force_mtsp_tiny(tiny, 2)
tiny_sol, _ = solve_integer(tiny, tiny_costs, 2)
print(f"\ntiny instance: optimum {opt.makespan:.2f}, best integer {tiny_sol.makespan:.2f}")
print(f"guarantee: integer <= (1 + delta/2) * optimum = {(1 + delta / 2) * opt.makespan:.2f}"
      f"  (delta = {delta:.2f})")
