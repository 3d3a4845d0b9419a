"""modcover: min-max multirobot coverage of linear modular environments.

The central entry points:

* build or load a :class:`ModularEnvironment` (``generators``, ``environment``);
* price each module with a TSP backend (``coverage_costs``);
* call :func:`solve_integer` for the optimal contiguous-block assignment;
* compare against :func:`frederickson` tour splitting (``baselines``).
"""

from .environment import (
    DistanceMatrix,
    EnvironmentFormatError,
    MetricGraph,
    ModularEnvironment,
    ModuleSpec,
    delta_index,
    load_environment,
    metric_closure,
    prefix_link_cost,
    save_environment,
    validate_environment,
)
from .tsp import (
    CoverageCostTable,
    Tour,
    christofides,
    coverage_costs,
    greedy_tour,
    held_karp,
    min_weight_perfect_matching,
    module_coverage_time,
    tour_time,
)
from .solver import (
    IntegerSolution,
    RobotTour,
    SplitTable,
    base_costs,
    block_time,
    build_robot_tours,
    build_split_table,
    load_solution,
    needed_robot_counts,
    save_solution,
    solution_makespan,
    solve_integer,
    split_point,
)
from .baselines import (
    GluedGraph,
    MultiTourSolution,
    brute_force_contiguous,
    brute_force_mtsp_tiny,
    frederickson,
    glue_environment,
)
from .generators import (
    DEFAULT_TEMPLATES,
    ModuleTemplate,
    PatternSpec,
    make_environment,
    make_module,
    scaled_templates,
)

__version__ = "0.1.0"

__all__ = [
    "DistanceMatrix",
    "EnvironmentFormatError",
    "MetricGraph",
    "ModularEnvironment",
    "ModuleSpec",
    "delta_index",
    "load_environment",
    "metric_closure",
    "prefix_link_cost",
    "save_environment",
    "validate_environment",
    "CoverageCostTable",
    "Tour",
    "christofides",
    "coverage_costs",
    "greedy_tour",
    "held_karp",
    "min_weight_perfect_matching",
    "module_coverage_time",
    "tour_time",
    "IntegerSolution",
    "RobotTour",
    "SplitTable",
    "base_costs",
    "block_time",
    "build_robot_tours",
    "build_split_table",
    "load_solution",
    "needed_robot_counts",
    "save_solution",
    "solution_makespan",
    "solve_integer",
    "split_point",
    "GluedGraph",
    "MultiTourSolution",
    "brute_force_contiguous",
    "brute_force_mtsp_tiny",
    "frederickson",
    "glue_environment",
    "DEFAULT_TEMPLATES",
    "ModuleTemplate",
    "PatternSpec",
    "make_environment",
    "make_module",
    "scaled_templates",
]
