import json

import pytest

from modcover import load_environment, load_solution, validate_environment
from modcover.bench import read_records
from modcover.cli import main


def run_cli(args) -> int:
    return main(args)


def gen_env(tmp_path, name="e.env", pattern="identical", n=6, link=4.0, base="star",
            rooms=4, seed=1) -> str:
    out = str(tmp_path / name)
    code = run_cli(
        [
            "gen", "--pattern", pattern, "--modules", str(n), "--link", str(link),
            "--base", base, "--rooms", str(rooms), "--seed", str(seed), "--out", out,
        ]
    )
    assert code == 0
    return out


class TestGen:
    def test_writes_valid_environment(self, tmp_path, capsys):
        out = gen_env(tmp_path)
        env = load_environment(out)
        assert validate_environment(env) == []
        assert env.n == 6
        assert capsys.readouterr().out.strip().endswith("e.env")

    def test_missing_modules_flag_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli(["gen", "--pattern", "identical", "--link", "4", "--out", str(tmp_path / "x")])
        assert exc.value.code == 2

    def test_byte_identical_determinism(self, tmp_path):
        a = gen_env(tmp_path, "a.env", seed=9)
        b = gen_env(tmp_path, "b.env", seed=9)
        assert open(a, "rb").read() == open(b, "rb").read()

    def test_random_pattern_uses_default_templates(self, tmp_path):
        out = str(tmp_path / "r.env")
        code = run_cli(["gen", "--pattern", "random", "--modules", "4", "--link", "20",
                        "--seed", "3", "--out", out])
        assert code == 0
        assert validate_environment(load_environment(out)) == []

    def test_env_var_seed_default(self, tmp_path, monkeypatch):
        monkeypatch.setenv("MODCOVER_SEED", "77")
        out1 = str(tmp_path / "s77.env")
        run_cli(["gen", "--pattern", "identical", "--modules", "3", "--link", "1",
                 "--rooms", "3", "--out", out1])
        out2 = str(tmp_path / "s77b.env")
        run_cli(["gen", "--pattern", "identical", "--modules", "3", "--link", "1",
                 "--rooms", "3", "--seed", "77", "--out", out2])
        assert open(out1, "rb").read() == open(out2, "rb").read()


class TestSolve:
    def test_summary_and_solution_file(self, tmp_path, capsys):
        env_path = gen_env(tmp_path)
        sol_path = str(tmp_path / "sol.json")
        code = run_cli(["solve", env_path, "--robots", "3", "--tsp", "exact",
                        "--tours", "--out", sol_path])
        assert code == 0
        out = capsys.readouterr().out
        assert "makespan=" in out and "robots_used=" in out and "seconds=" in out
        doc = load_solution(sol_path)
        assert doc["algorithm"] == "integer"
        assert len(doc["robots"]) == 3

    def test_identical_star_chain_saturates(self, tmp_path, capsys):
        # 30 identical star modules, doorways 20 m apart: the makespan floor
        # is reaching/covering/returning from the last module, so beyond the
        # saturation point extra robots stay idle.
        env_path = str(tmp_path / "b30.env")
        assert run_cli(["gen", "--pattern", "identical", "--modules", "30",
                        "--link", "20", "--base", "star", "--seed", "1",
                        "--out", env_path]) == 0
        capsys.readouterr()
        assert run_cli(["solve", env_path, "--robots", "20",
                        "--tsp", "christofides", "--dedupe-modules"]) == 0
        summary = capsys.readouterr().out
        used = int(summary.split("robots_used=")[1].split()[0])
        assert used <= 18

    def test_missing_env_file_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli(["solve", str(tmp_path / "nope.env"), "--robots", "2"])
        assert exc.value.code == 2

    def test_frederickson_single_module_single_robot(self, tmp_path, capsys):
        env_path = gen_env(tmp_path, n=1, rooms=3)
        code = run_cli(["solve", env_path, "--algo", "frederickson", "--robots", "1",
                        "--tsp", "exact"])
        assert code == 0
        assert "makespan=" in capsys.readouterr().out

    def test_exact_backend_oversize_exits_1(self, tmp_path, capsys):
        env_path = gen_env(tmp_path, n=2, rooms=20, base="ring")
        code = run_cli(["solve", env_path, "--robots", "1", "--tsp", "exact"])
        assert code == 1
        assert "capped at 15" in capsys.readouterr().err

    def test_invalid_environment_exits_1(self, tmp_path, capsys):
        path = tmp_path / "bad.env"
        doc = {
            "name": "bad",
            "modules": [
                {"id": 1, "doorway": "a",
                 "vertices": [{"id": "a"}, {"id": "b"}],
                 "edges": []}
            ],
            "linking": [],
        }
        path.write_text(json.dumps(doc))
        code = run_cli(["solve", str(path), "--robots", "1"])
        assert code == 1
        assert "invalid environment" in capsys.readouterr().err


class TestCompare:
    def test_two_algorithms_two_rows(self, tmp_path, capsys):
        env_path = gen_env(tmp_path, n=4, rooms=3)
        csv_path = str(tmp_path / "cmp.csv")
        code = run_cli(["compare", env_path, "--robots", "2", "--tsp", "greedy",
                        "--out", csv_path])
        assert code == 0
        records = read_records(csv_path)
        assert len(records) == 2
        assert {r.algorithm for r in records} == {"integer", "frederickson"}
        by_algo = {r.algorithm: r for r in records}
        assert by_algo["integer"].makespan <= by_algo["frederickson"].makespan

    def test_csv_reparses_equal(self, tmp_path):
        env_path = gen_env(tmp_path, n=3, rooms=3)
        csv_path = str(tmp_path / "cmp.csv")
        run_cli(["compare", env_path, "--robots", "1,2", "--algos", "integer",
                 "--tsp", "exact", "--out", csv_path])
        records = read_records(csv_path)
        assert len(records) == 2
        assert all(r.status == "ok" for r in records)

    def test_bad_robot_list_exits_2(self, tmp_path):
        env_path = gen_env(tmp_path, n=3, rooms=3)
        with pytest.raises(SystemExit) as exc:
            run_cli(["compare", env_path, "--robots", "two", "--out", str(tmp_path / "c.csv")])
        assert exc.value.code == 2


class TestSweep:
    def test_robot_sweep_outputs(self, tmp_path):
        out_dir = tmp_path / "sweep"
        code = run_cli(["sweep", "--axis", "robots", "--values", "1:3",
                        "--modules", "4", "--link", "2", "--rooms", "3",
                        "--tsp", "greedy", "--seed", "5", "--out-dir", str(out_dir)])
        assert code == 0
        records = read_records(out_dir / "sweep.csv")
        assert [r.m for r in records] == [1, 2, 3]
        mks = [r.makespan for r in records]
        assert mks == sorted(mks, reverse=True)
        for svg in ("makespan.svg", "allocation.svg", "compute_time.svg"):
            content = (out_dir / svg).read_text()
            assert content.lstrip().startswith("<?xml")

    def test_module_sweep_monotone(self, tmp_path):
        out_dir = tmp_path / "msweep"
        code = run_cli(["sweep", "--axis", "modules", "--values", "2,4,6",
                        "--robots", "2", "--link", "2", "--rooms", "3",
                        "--tsp", "greedy", "--seed", "5", "--out-dir", str(out_dir)])
        assert code == 0
        records = read_records(out_dir / "sweep.csv")
        mks = [r.makespan for r in records]
        assert mks == sorted(mks)

    def test_link_sweep_balanced_at_zero(self, tmp_path):
        # n a multiple of m: at zero doorway distance every robot's tour
        # time is identical, so the std column is exactly zero.
        out_dir = tmp_path / "lsweep"
        code = run_cli(["sweep", "--axis", "link", "--values", "0,2", "--modules", "4",
                        "--robots", "2", "--rooms", "4", "--tsp", "christofides",
                        "--seed", "3", "--out-dir", str(out_dir)])
        assert code == 0
        records = read_records(out_dir / "sweep.csv")
        assert records[0].link_dist == 0.0
        assert records[0].tour_time_std == 0.0

    def test_empty_range_exits_2(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run_cli(["sweep", "--axis", "robots", "--values", "", "--out-dir", str(tmp_path)])
        assert exc.value.code == 2

    def test_results_deterministic(self, tmp_path):
        # Everything except the wall-clock measurement columns (and the plot
        # scaled to them) must be byte-identical across runs.
        args = ["sweep", "--axis", "link", "--values", "0:4:2", "--modules", "3",
                "--robots", "2", "--rooms", "3", "--tsp", "greedy", "--seed", "5"]
        run_cli(args + ["--out-dir", str(tmp_path / "a")])
        run_cli(args + ["--out-dir", str(tmp_path / "b")])
        for name in ("makespan.svg", "allocation.svg"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        ra = read_records(tmp_path / "a" / "sweep.csv")
        rb = read_records(tmp_path / "b" / "sweep.csv")
        skip = {"tsp_seconds", "dp_seconds"}
        from modcover.bench import CSV_FIELDS

        for a, b in zip(ra, rb):
            for field in CSV_FIELDS:
                if field not in skip:
                    assert getattr(a, field) == getattr(b, field), field


class TestUsage:
    def test_no_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            run_cli([])
        assert exc.value.code == 2

    def test_unknown_algorithm_exits_2(self, tmp_path):
        env_path = gen_env(tmp_path, n=2, rooms=3)
        with pytest.raises(SystemExit) as exc:
            run_cli(["solve", env_path, "--robots", "1", "--algo", "alien"])
        assert exc.value.code == 2
