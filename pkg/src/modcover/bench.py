"""Benchmark records, CSV schema, timing helpers, and SVG plot emission.

One BenchmarkRecord per (instance, robot count, algorithm) run.  TSP
backend time and split/DP time are reported as separate columns so the
"compute module tours once per distinct geometry" mode (``dedupe``) is
measurable against the per-module recompute mode.
"""

from __future__ import annotations

import csv
import signal
import time
from contextlib import contextmanager
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .baselines import frederickson
from .environment import ModularEnvironment
from .solver import IntegerSolution, solve_integer
from .tsp import coverage_costs

CSV_SCHEMA_VERSION = "modcover-1"

DEFAULT_TIMEOUT = 3600.0  # seconds per run

ALGORITHMS = ("integer", "frederickson")


@dataclass
class BenchmarkRecord:
    instance: str
    pattern: str
    n: int
    m: int
    link_dist: float
    algorithm: str
    backend: str
    makespan: float
    mean_tour_time: float
    tour_time_std: float
    robots_used: int
    tsp_seconds: float
    dp_seconds: float
    seed: int
    status: str = "ok"
    schema_version: str = CSV_SCHEMA_VERSION


CSV_FIELDS = [f.name for f in fields(BenchmarkRecord)]

_FIELD_TYPES = {f.name: f.type for f in fields(BenchmarkRecord)}


def tour_time_stats(times: Sequence[float]) -> tuple[float, float]:
    """Mean and standard deviation of a set of tour times.

    The data is shifted by its first value before the moments are taken
    (std is shift-invariant); this avoids catastrophic cancellation and
    makes the std of identical times exactly zero.
    """
    if len(times) == 0:
        return 0.0, 0.0
    arr = np.asarray(times, dtype=float)
    shifted = arr - arr[0]
    return float(arr[0] + shifted.mean()), float(shifted.std())


class RunTimeout(Exception):
    pass


@contextmanager
def time_limit(seconds: Optional[float]):
    """Abort the enclosed block after ``seconds`` of wall-clock time (SIGALRM)."""
    if not seconds or seconds <= 0:
        yield
        return

    def _handler(signum, frame):
        raise RunTimeout()

    old = signal.signal(signal.SIGALRM, _handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0.0)
        signal.signal(signal.SIGALRM, old)


def _uniform_link_dist(env: ModularEnvironment) -> float:
    if not env.linking:
        return 0.0
    first = env.linking[0]
    return first if all(w == first for w in env.linking) else float("nan")


def run_algorithm(
    env: ModularEnvironment,
    m: int,
    algorithm: str,
    backend: str = "christofides",
    dedupe: bool = False,
    timeout: Optional[float] = DEFAULT_TIMEOUT,
    instance: str = "",
    pattern: str = "",
    link_dist: Optional[float] = None,
    seed: int = 0,
):
    """Run one algorithm on one instance and collect a BenchmarkRecord.

    Returns (record, solution); the solution is None when the run failed
    or timed out (the record's status says which).  File I/O is excluded
    from the timed phases by construction: only TSP-backend work counts in
    tsp_seconds and only assignment/splitting work counts in dp_seconds.
    """
    rec = BenchmarkRecord(
        instance=instance or env.name,
        pattern=pattern,
        n=env.n,
        m=m,
        link_dist=_uniform_link_dist(env) if link_dist is None else link_dist,
        algorithm=algorithm,
        backend=backend,
        makespan=float("nan"),
        mean_tour_time=float("nan"),
        tour_time_std=float("nan"),
        robots_used=0,
        tsp_seconds=float("nan"),
        dp_seconds=float("nan"),
        seed=seed,
    )
    try:
        with time_limit(timeout):
            if algorithm == "integer":
                t0 = time.perf_counter()
                costs = coverage_costs(env, backend=backend, dedupe=dedupe)
                t1 = time.perf_counter()
                solution, _ = solve_integer(env, costs, m)
                t2 = time.perf_counter()
            elif algorithm == "frederickson":
                t0 = time.perf_counter()
                solution = frederickson(env, m, tsp_backend=backend)
                t1 = t2 = time.perf_counter()
            else:
                raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    except RunTimeout:
        rec.status = "timeout"
        return rec, None
    except Exception as exc:  # recorded, the sweep continues
        rec.status = f"error: {exc}"
        return rec, None

    mean, std = tour_time_stats(solution.used_times)
    rec.makespan = solution.makespan
    rec.mean_tour_time = mean
    rec.tour_time_std = std
    rec.robots_used = solution.robots_used
    rec.tsp_seconds = t1 - t0
    rec.dp_seconds = t2 - t1
    return rec, solution


def write_records(path, records: Iterable[BenchmarkRecord], append: bool = False) -> None:
    """Write records as CSV; appending to an existing file checks the header."""
    path = Path(path)
    exists = append and path.exists() and path.stat().st_size > 0
    if exists:
        with open(path, newline="") as f:
            header = next(csv.reader(f))
        if header != CSV_FIELDS:
            raise ValueError(f"{path}: existing header does not match schema {CSV_SCHEMA_VERSION}")
    with open(path, "a" if exists else "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_FIELDS)
        if not exists:
            writer.writeheader()
        for rec in records:
            writer.writerow({k: getattr(rec, k) for k in CSV_FIELDS})


def read_records(path) -> list[BenchmarkRecord]:
    out = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != CSV_FIELDS:
            raise ValueError(f"{path}: header does not match schema {CSV_SCHEMA_VERSION}")
        for row in reader:
            kwargs = {}
            for name, typ in _FIELD_TYPES.items():
                raw = row[name]
                if typ == "int":
                    kwargs[name] = int(raw)
                elif typ == "float":
                    kwargs[name] = float(raw)
                else:
                    kwargs[name] = raw
            rec = BenchmarkRecord(**kwargs)
            if rec.schema_version != CSV_SCHEMA_VERSION:
                raise ValueError(f"{path}: unsupported schema version {rec.schema_version!r}")
            out.append(rec)
    return out


def time_integer_dp(env: ModularEnvironment, costs, m: int, repeats: int = 3) -> float:
    """Best-of wall-clock seconds for the assignment DP with precomputed costs."""
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        solve_integer(env, costs, m)
        best = min(best, time.perf_counter() - t0)
    return best


# --- SVG plots ---------------------------------------------------------------


def _pyplot():
    import matplotlib

    matplotlib.use("Agg", force=False)
    matplotlib.rcParams["svg.hashsalt"] = "modcover"
    import matplotlib.pyplot as plt

    return plt


def _save_svg(fig, path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def plot_makespan(records: Sequence[BenchmarkRecord], axis_values: Sequence, xlabel: str, path) -> None:
    """Makespan, mean tour time, and a std band against the sweep axis."""
    plt = _pyplot()
    mk = [r.makespan for r in records]
    mean = [r.mean_tour_time for r in records]
    std = np.array([r.tour_time_std for r in records])
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(axis_values, mk, "o-", label="makespan")
    ax.plot(axis_values, mean, "s--", label="mean tour time")
    ax.fill_between(axis_values, np.array(mean) - std, np.array(mean) + std, alpha=0.25, label="±1 std")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("tour time")
    ax.legend()
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def plot_allocation(
    solutions: Sequence[Optional[IntegerSolution]],
    axis_values: Sequence,
    xlabel: str,
    path,
) -> None:
    """Robot-to-module allocation strips: one horizontal bar per sweep point."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 0.5 + 0.3 * len(solutions)))
    cmap = plt.get_cmap("tab20")
    for row, (sol, val) in enumerate(zip(solutions, axis_values)):
        if sol is None:
            continue
        for r, block in enumerate(sol.blocks):
            if block is None:
                continue
            i, j = block
            ax.broken_barh([(i - 0.5, j - i + 1)], (row - 0.4, 0.8), facecolors=cmap(r % 20))
    ax.set_yticks(range(len(axis_values)))
    ax.set_yticklabels([str(v) for v in axis_values])
    ax.set_xlabel("module index")
    ax.set_ylabel(xlabel)
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)


def plot_compute_time(records: Sequence[BenchmarkRecord], axis_values: Sequence, xlabel: str, path) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.4))
    ax.plot(axis_values, [r.tsp_seconds for r in records], "o-", label="tsp_seconds")
    ax.plot(axis_values, [r.dp_seconds for r in records], "s--", label="dp_seconds")
    ax.plot(
        axis_values,
        [r.tsp_seconds + r.dp_seconds for r in records],
        "^:",
        label="total",
    )
    ax.set_xlabel(xlabel)
    ax.set_ylabel("seconds")
    ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    _save_svg(fig, path)
    plt.close(fig)
