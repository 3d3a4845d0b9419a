import json
import math

import numpy as np
import pytest

from modcover import (
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
from conftest import random_connected_graph, synth_instance


def floyd_oracle(g: MetricGraph) -> np.ndarray:
    """Naive all-pairs relaxation, independent of the scipy-backed closure."""
    n = g.size
    idx = {v: i for i, v in enumerate(g.vertices)}
    d = np.full((n, n), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v, w in g.edges:
        d[idx[u], idx[v]] = min(d[idx[u], idx[v]], w)
        d[idx[v], idx[u]] = min(d[idx[v], idx[u]], w)
    for k in range(n):
        for i in range(n):
            for j in range(n):
                d[i, j] = min(d[i, j], d[i, k] + d[k, j])
    return d


class TestMetricClosure:
    def test_path_graph(self):
        g = MetricGraph(("a", "b", "c"), (("a", "b", 1.0), ("b", "c", 1.0)))
        d = metric_closure(g)
        assert d.d("a", "c") == 2.0

    def test_heavy_edge_shortcut(self):
        g = MetricGraph(("a", "b", "c"), (("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 3.0)))
        d = metric_closure(g)
        assert d.d("a", "c") == 2.0

    def test_matches_floyd_oracle(self, rng):
        g = random_connected_graph(rng, 10, extra_edges=8)
        d = metric_closure(g)
        expected = floyd_oracle(g)
        assert np.allclose(d.matrix, expected, rtol=1e-12)

    def test_disconnected_raises(self):
        g = MetricGraph(("a", "b", "c"), (("a", "b", 1.0),))
        with pytest.raises(ValueError, match="disconnected"):
            metric_closure(g)

    def test_closure_invariants_random_graphs(self, rng):
        for _ in range(25):
            n = int(rng.integers(2, 12))
            g = random_connected_graph(rng, n, extra_edges=int(rng.integers(0, 10)))
            d = metric_closure(g)
            assert d.violations() == []


class TestValidateEnvironment:
    def test_minimal_environment_valid(self):
        env = ModularEnvironment((ModuleSpec(MetricGraph(("v",), ()), "v"),), ())
        assert validate_environment(env) == []

    def test_disconnected_module_reported(self):
        g = MetricGraph(("a", "b"), ())
        env = ModularEnvironment((ModuleSpec(g, "a"),), ())
        assert any("module 1 disconnected" in v for v in validate_environment(env))

    def test_linking_length_mismatch(self):
        mods = (
            ModuleSpec(MetricGraph(("a",), ()), "a"),
            ModuleSpec(MetricGraph(("b",), ()), "b"),
        )
        env = ModularEnvironment(mods, (1.0, 2.0))
        assert any("linking" in v for v in validate_environment(env))

    def test_bad_doorway_reported(self):
        env = ModularEnvironment((ModuleSpec(MetricGraph(("a",), ()), "z"),), ())
        assert any("doorway" in v for v in validate_environment(env))

    def test_namespacing_makes_modules_disjoint(self):
        mods = (
            ModuleSpec(MetricGraph(("v",), ()), "v"),
            ModuleSpec(MetricGraph(("v",), ()), "v"),
        )
        env = ModularEnvironment(mods, (1.0,))
        assert env.modules[0].graph.vertices == ("m1/v",)
        assert env.modules[1].graph.vertices == ("m2/v",)
        assert validate_environment(env) == []


class TestPrefixLinkCost:
    def test_first_module_is_zero(self):
        env, _ = synth_instance((1.0, 1.0), (7.0,))
        assert prefix_link_cost(env, 1) == 0.0

    def test_hand_arithmetic(self):
        env, _ = synth_instance((1.0,) * 4, (20.0, 20.0, 20.0))
        assert prefix_link_cost(env, 3) == 40.0

    def test_thirty_modules(self):
        env, _ = synth_instance((1.0,) * 30, (20.0,) * 29)
        assert prefix_link_cost(env, 30) == 580.0

    def test_difference_equals_linking(self, rng):
        links = rng.uniform(0, 50, 9)
        env, _ = synth_instance((1.0,) * 10, links)
        for i in range(1, 10):
            diff = prefix_link_cost(env, i + 1) - prefix_link_cost(env, i)
            assert diff == pytest.approx(links[i - 1], rel=1e-12)

    def test_out_of_range(self):
        env, _ = synth_instance((1.0,), ())
        with pytest.raises(IndexError):
            prefix_link_cost(env, 0)
        with pytest.raises(IndexError):
            prefix_link_cost(env, 2)


class TestDeltaIndex:
    def test_paper_scale_instance(self):
        env, costs = synth_instance((347.0,) * 30, (20.0,) * 29)
        assert delta_index(env, costs) == pytest.approx(347.0 / 580.0, rel=1e-12)
        assert delta_index(env, costs) == pytest.approx(0.59827, abs=1e-5)

    def test_single_module_is_infinite(self):
        env, costs = synth_instance((5.0,), ())
        assert delta_index(env, costs) == math.inf

    def test_zero_linking_is_infinite(self):
        env, costs = synth_instance((5.0, 5.0), (0.0,))
        assert delta_index(env, costs) == math.inf

    def test_small_arithmetic(self):
        env, costs = synth_instance((1.0, 2.0, 3.0), (3.0, 3.0))
        assert delta_index(env, costs) == 0.5

    def test_only_max_matters(self):
        env1, costs1 = synth_instance((3.0, 1.0, 2.0), (3.0, 3.0))
        env2, costs2 = synth_instance((2.0, 1.0, 3.0), (3.0, 3.0))
        assert delta_index(env1, costs1) == delta_index(env2, costs2)


def _example_env() -> ModularEnvironment:
    g1 = MetricGraph(
        ("a", "b", "c"),
        (("a", "b", 1.5), ("b", "c", 2.0)),
        {"a": (0.0, 0.0), "b": (1.5, 0.0), "c": (3.5, 0.0)},
    )
    g2 = MetricGraph(("x", "y"), (("x", "y", 4.0),))
    return ModularEnvironment(
        (ModuleSpec(g1, "b"), ModuleSpec(g2, "x")), (6.25,), name="round-trip"
    )


class TestEnvironmentFile:
    def test_round_trip_identity(self, tmp_path):
        env = _example_env()
        path = tmp_path / "env.json"
        save_environment(env, path)
        assert load_environment(path) == env

    def test_round_trip_generated(self, tmp_path, rng):
        from modcover import PatternSpec, make_environment
        from conftest import small_templates

        env = make_environment(PatternSpec("random", 5, 3.0, seed=9), small_templates(3, 4, 3))
        path = tmp_path / "gen.json"
        save_environment(env, path)
        assert load_environment(path) == env

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{ not json")
        with pytest.raises(EnvironmentFormatError, match="line"):
            load_environment(path)

    def test_unknown_field_rejected(self, tmp_path):
        env = _example_env()
        path = tmp_path / "env.json"
        save_environment(env, path)
        doc = json.loads(path.read_text())
        doc["extra"] = 1
        path.write_text(json.dumps(doc))
        with pytest.raises(EnvironmentFormatError, match="unknown field"):
            load_environment(path)

    def test_missing_field_has_context(self, tmp_path):
        path = tmp_path / "env.json"
        doc = {"name": "x", "modules": [{"id": 1, "doorway": "a", "vertices": [{"id": "a"}]}], "linking": []}
        path.write_text(json.dumps(doc))
        with pytest.raises(EnvironmentFormatError, match=r"modules\[0\]"):
            load_environment(path)

    def test_negative_weight_loads_but_fails_validation(self, tmp_path):
        path = tmp_path / "env.json"
        doc = {
            "name": "neg",
            "modules": [
                {
                    "id": 1,
                    "doorway": "a",
                    "vertices": [{"id": "a"}, {"id": "b"}],
                    "edges": [{"u": "a", "v": "b", "w": -1.0}],
                }
            ],
            "linking": [],
        }
        path.write_text(json.dumps(doc))
        env = load_environment(path)
        assert any("weight" in v for v in validate_environment(env))
