import math
import time

import numpy as np
import pytest

from modcover import PatternSpec, make_environment
from modcover.bench import (
    CSV_FIELDS,
    read_records,
    run_algorithm,
    time_limit,
    RunTimeout,
    tour_time_stats,
    write_records,
)
from conftest import small_templates


def small_env(n=4, link=3.0, seed=2):
    return make_environment(PatternSpec("random", n, link, seed=seed), small_templates(3, 4, 3))


class TestTourTimeStats:
    def test_identical_times_have_exactly_zero_std(self):
        # 0.1 * 3 is the classic case where a naive mean drifts off the datum
        mean, std = tour_time_stats([0.1, 0.1, 0.1])
        assert std == 0.0
        assert mean == 0.1

    def test_matches_numpy_on_generic_data(self, rng):
        data = rng.uniform(0, 100, 17)
        mean, std = tour_time_stats(data)
        assert mean == pytest.approx(float(np.mean(data)), rel=1e-12)
        assert std == pytest.approx(float(np.std(data)), rel=1e-9)

    def test_empty(self):
        assert tour_time_stats([]) == (0.0, 0.0)


class TestRunAlgorithm:
    def test_integer_record(self):
        env = small_env()
        rec, sol = run_algorithm(env, 2, "integer", backend="exact", pattern="random", seed=2)
        assert rec.status == "ok"
        assert rec.algorithm == "integer"
        assert rec.n == 4 and rec.m == 2
        assert rec.makespan == sol.makespan
        assert rec.robots_used <= rec.m
        assert rec.makespan >= rec.mean_tour_time
        assert rec.tsp_seconds > 0 and rec.dp_seconds > 0

    def test_frederickson_record(self):
        env = small_env()
        rec, sol = run_algorithm(env, 2, "frederickson", backend="greedy")
        assert rec.status == "ok"
        assert rec.makespan == sol.makespan

    def test_failure_becomes_status_row(self):
        env = small_env()
        rec, sol = run_algorithm(env, 2, "no-such-algorithm")
        assert sol is None
        assert rec.status.startswith("error")
        assert math.isnan(rec.makespan)

    def test_timeout_marks_row(self):
        env = small_env(n=8)
        rec, sol = run_algorithm(env, 3, "integer", backend="exact", timeout=1e-4)
        assert sol is None
        assert rec.status == "timeout"

    def test_time_limit_context(self):
        with pytest.raises(RunTimeout):
            with time_limit(0.05):
                time.sleep(1.0)
        with time_limit(5.0):
            pass  # no alarm left behind
        time.sleep(0.06)


class TestCsv:
    def test_round_trip(self, tmp_path, rng):
        env = small_env()
        recs = [run_algorithm(env, m, "integer", backend="greedy")[0] for m in (1, 2, 3)]
        path = tmp_path / "out.csv"
        write_records(path, recs)
        back = read_records(path)
        assert back == recs

    def test_header_is_schema(self, tmp_path):
        path = tmp_path / "out.csv"
        write_records(path, [])
        assert path.read_text().strip().split(",") == CSV_FIELDS

    def test_append_safe(self, tmp_path):
        env = small_env()
        rec1, _ = run_algorithm(env, 1, "integer", backend="greedy")
        rec2, _ = run_algorithm(env, 2, "integer", backend="greedy")
        path = tmp_path / "out.csv"
        write_records(path, [rec1])
        write_records(path, [rec2], append=True)
        assert read_records(path) == [rec1, rec2]

    def test_append_rejects_other_schema(self, tmp_path):
        path = tmp_path / "out.csv"
        path.write_text("another,header\n1,2\n")
        with pytest.raises(ValueError, match="header"):
            write_records(path, [], append=True)

    def test_version_token_checked(self, tmp_path):
        env = small_env()
        rec, _ = run_algorithm(env, 1, "integer", backend="greedy")
        rec.schema_version = "modcover-999"
        path = tmp_path / "out.csv"
        write_records(path, [rec])
        with pytest.raises(ValueError, match="schema version"):
            read_records(path)
