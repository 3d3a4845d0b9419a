"""Command-line front end: generate, solve, compare, sweep.

Exit codes: 0 success, 1 runtime failure, 2 usage error.  The environment
variable MODCOVER_SEED supplies the default seed when --seed is omitted.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

from . import bench
from .baselines import frederickson
from .environment import load_environment, save_environment, validate_environment
from .generators import (
    DEFAULT_TEMPLATES,
    ModuleTemplate,
    PatternSpec,
    make_environment,
)
from .solver import build_robot_tours, save_solution, solve_integer
from .tsp import coverage_costs

_BASE_TOPOLOGIES = {"ring": "A", "star": "B", "corridor": "C"}


def _default_seed() -> int:
    return int(os.environ.get("MODCOVER_SEED", "0"))


def _env_file(parser: argparse.ArgumentParser, path: str):
    if not Path(path).is_file():
        parser.error(f"environment file not found: {path}")
    return load_environment(path)


def _add_gen(sub):
    p = sub.add_parser("gen", help="generate a synthetic modular environment file")
    p.add_argument("--pattern", required=True, choices=["identical", "random", "increasing", "decreasing"])
    p.add_argument("--modules", required=True, type=int, help="number of modules n")
    p.add_argument("--link", required=True, type=float, help="doorway-to-doorway distance (m)")
    p.add_argument("--base", choices=sorted(_BASE_TOPOLOGIES), default="star",
                   help="base topology for the identical pattern")
    p.add_argument("--rooms", type=int, default=None,
                   help="override the room count of the base template (identical pattern only)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    return p


def _cmd_gen(args, parser) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.modules < 1:
        parser.error("--modules must be >= 1")
    if args.link < 0:
        parser.error("--link must be >= 0")
    spec = PatternSpec(args.pattern, args.modules, args.link, seed)
    if args.pattern == "identical":
        base = DEFAULT_TEMPLATES[_BASE_TOPOLOGIES[args.base]]
        if args.rooms is not None:
            base = ModuleTemplate(base.topology, args.rooms, base.scale, base.seed)
        env = make_environment(spec, base)
    else:
        env = make_environment(spec, DEFAULT_TEMPLATES)
    save_environment(env, args.out)
    print(args.out)
    return 0


def _add_solve(sub):
    p = sub.add_parser("solve", help="solve an environment file")
    p.add_argument("env", help="environment file")
    p.add_argument("--robots", required=True, type=int)
    p.add_argument("--algo", choices=["integer", "frederickson"], default="integer")
    p.add_argument("--tsp", choices=["exact", "christofides", "greedy"], default="christofides")
    p.add_argument("--dedupe-modules", action="store_true",
                   help="compute module tours once per distinct geometry")
    p.add_argument("--tours", action="store_true", help="include vertex-level tours in the output")
    p.add_argument("--out", default=None, help="write the solution file here")
    return p


def _cmd_solve(args, parser) -> int:
    env = _env_file(parser, args.env)
    violations = validate_environment(env)
    if violations:
        for v in violations:
            print(f"invalid environment: {v}", file=sys.stderr)
        return 1
    if args.robots < 1:
        parser.error("--robots must be >= 1")

    t0 = time.perf_counter()
    if args.algo == "integer":
        costs = coverage_costs(env, backend=args.tsp, dedupe=args.dedupe_modules)
        solution, _ = solve_integer(env, costs, args.robots)
        tours = build_robot_tours(env, solution, costs.tours) if args.tours else None
    else:
        solution = frederickson(env, args.robots, tsp_backend=args.tsp)
        tours = None
    elapsed = time.perf_counter() - t0

    if args.out:
        save_solution(solution, args.out, algorithm=args.algo, tours=tours)
    print(
        f"algorithm={args.algo} backend={args.tsp} makespan={solution.makespan:.6g} "
        f"robots_used={solution.robots_used} seconds={elapsed:.3f}"
    )
    return 0


def _add_compare(sub):
    p = sub.add_parser("compare", help="run algorithms over environment files, emit CSV")
    p.add_argument("envs", nargs="+", help="environment files")
    p.add_argument("--robots", required=True, help="comma-separated robot counts, e.g. 5,10,20")
    p.add_argument("--algos", default="integer,frederickson")
    p.add_argument("--tsp", choices=["exact", "christofides", "greedy"], default="christofides")
    p.add_argument("--dedupe-modules", action="store_true")
    p.add_argument("--timeout", type=float, default=bench.DEFAULT_TIMEOUT, help="seconds per run")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--append", action="store_true")
    p.add_argument("--out", required=True, help="CSV output path")
    return p


def _parse_int_list(parser, text: str, flag: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        parser.error(f"{flag} expects a comma-separated list of integers")
    if not values:
        parser.error(f"{flag} is empty")
    return values


def _cmd_compare(args, parser) -> int:
    robot_counts = _parse_int_list(parser, args.robots, "--robots")
    algos = [a for a in args.algos.split(",") if a]
    for a in algos:
        if a not in bench.ALGORITHMS:
            parser.error(f"unknown algorithm {a!r}")
    seed = args.seed if args.seed is not None else _default_seed()

    records = []
    for path in args.envs:
        env = _env_file(parser, path)
        for m in robot_counts:
            for algo in algos:
                rec, _ = bench.run_algorithm(
                    env,
                    m,
                    algo,
                    backend=args.tsp,
                    dedupe=args.dedupe_modules,
                    timeout=args.timeout,
                    instance=Path(path).name,
                    seed=seed,
                )
                records.append(rec)
                print(
                    f"{rec.instance} m={m} {algo}: status={rec.status} "
                    f"makespan={rec.makespan:.6g}"
                )
    bench.write_records(args.out, records, append=args.append)
    print(args.out)
    return 0


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="sweep one axis, emit CSV and SVG plots")
    p.add_argument("--axis", required=True, choices=["modules", "robots", "link"])
    p.add_argument("--values", required=True,
                   help="comma list (10,20,30) or inclusive range lo:hi[:step]")
    p.add_argument("--modules", type=int, default=30)
    p.add_argument("--robots", type=int, default=10)
    p.add_argument("--link", type=float, default=20.0)
    p.add_argument("--pattern", choices=["identical", "random", "increasing", "decreasing"],
                   default="identical")
    p.add_argument("--base", choices=sorted(_BASE_TOPOLOGIES), default="star")
    p.add_argument("--rooms", type=int, default=None)
    p.add_argument("--tsp", choices=["exact", "christofides", "greedy"], default="christofides")
    p.add_argument("--dedupe-modules", action="store_true")
    p.add_argument("--timeout", type=float, default=bench.DEFAULT_TIMEOUT)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", required=True)
    return p


def _parse_values(parser, text: str, as_float: bool) -> list:
    conv = float if as_float else int
    try:
        if ":" in text:
            parts = [conv(x) for x in text.split(":")]
            lo, hi = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else conv(1)
            out = []
            v = lo
            while v <= hi + (1e-9 if as_float else 0):
                out.append(conv(v))
                v += step
            return out
        return [conv(x) for x in text.split(",") if x != ""]
    except (ValueError, IndexError):
        parser.error("--values expects a comma list or lo:hi[:step] range")


def _cmd_sweep(args, parser) -> int:
    as_float = args.axis == "link"
    values = _parse_values(parser, args.values, as_float)
    if not values:
        parser.error("--values produced an empty sweep")
    seed = args.seed if args.seed is not None else _default_seed()

    def build_env(n, link):
        spec = PatternSpec(args.pattern, n, link, seed)
        if args.pattern == "identical":
            base = DEFAULT_TEMPLATES[_BASE_TOPOLOGIES[args.base]]
            if args.rooms is not None:
                base = ModuleTemplate(base.topology, args.rooms, base.scale, base.seed)
            return make_environment(spec, base)
        return make_environment(spec, DEFAULT_TEMPLATES)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    records, solutions = [], []
    env = None
    for v in values:
        n = v if args.axis == "modules" else args.modules
        link = v if args.axis == "link" else args.link
        m = v if args.axis == "robots" else args.robots
        if env is None or args.axis != "robots":
            env = build_env(n, link)
        rec, sol = bench.run_algorithm(
            env,
            m,
            "integer",
            backend=args.tsp,
            dedupe=args.dedupe_modules,
            timeout=args.timeout,
            pattern=args.pattern,
            link_dist=link,
            seed=seed,
        )
        records.append(rec)
        solutions.append(sol)
        print(f"{args.axis}={v}: status={rec.status} makespan={rec.makespan:.6g}")

    csv_path = out_dir / "sweep.csv"
    bench.write_records(csv_path, records)
    xlabel = {"modules": "modules n", "robots": "robots m", "link": "doorway distance"}[args.axis]
    ok = [r.status == "ok" for r in records]
    good_records = [r for r, o in zip(records, ok) if o]
    good_values = [v for v, o in zip(values, ok) if o]
    good_solutions = [s for s, o in zip(solutions, ok) if o]
    if good_records:
        bench.plot_makespan(good_records, good_values, xlabel, out_dir / "makespan.svg")
        bench.plot_allocation(good_solutions, good_values, xlabel, out_dir / "allocation.svg")
        bench.plot_compute_time(good_records, good_values, xlabel, out_dir / "compute_time.svg")
    print(csv_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modcover",
        description="Min-max multirobot coverage of linear modular environments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_gen(sub)
    _add_solve(sub)
    _add_compare(sub)
    _add_sweep(sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "gen": _cmd_gen,
        "solve": _cmd_solve,
        "compare": _cmd_compare,
        "sweep": _cmd_sweep,
    }
    try:
        return handlers[args.command](args, parser)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
