import math
import os
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from proxvr import RngStream, RunTrace, make_synthetic_nnpca
from proxvr.bench import (ConfigError, ExperimentConfig, compute_baseline,
                          emit_csv, emit_svg, parse_kv_pairs, parse_seed_spec,
                          load_config, read_csv, run_experiment, run_single,
                          run_warm_start, saga_table_from_warm, summarize,
                          svg_transform, tune_sgd)


def tiny_cfg(tmp_path, **kw):
    base = dict(solvers=["proxsvrg"], synthetic={"n": 32, "d": 3}, passes=4.0,
                seeds=[1, 2], stride=1.0, out_dir=str(tmp_path))
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfigValidation:
    def test_zero_passes_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="passes"):
            tiny_cfg(tmp_path, passes=0.0).validate()

    def test_empty_seeds_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="seed"):
            tiny_cfg(tmp_path, seeds=[]).validate()

    def test_unknown_solver_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown solver"):
            tiny_cfg(tmp_path, solvers=["sgd"]).validate()

    def test_needs_exactly_one_problem(self, tmp_path):
        with pytest.raises(ConfigError, match="exactly one"):
            tiny_cfg(tmp_path, synthetic=None).validate()
        with pytest.raises(ConfigError, match="exactly one"):
            tiny_cfg(tmp_path, data_path="x.libsvm").validate()

    def test_epoch_len_for_saga_rejected(self, tmp_path):
        with pytest.raises(ConfigError, match="epoch-len"):
            tiny_cfg(tmp_path, solvers=["proxsaga"], epoch_len=4).validate()

    def test_plan_solver_mismatch(self, tmp_path):
        with pytest.raises(ConfigError, match="thm2"):
            tiny_cfg(tmp_path, solvers=["proxsaga"], plan_mode="thm2").validate()
        with pytest.raises(ConfigError, match="thm3"):
            tiny_cfg(tmp_path, solvers=["proxsvrg"], plan_mode="thm3").validate()

    def test_pl_solver_needs_pl_problem(self, tmp_path):
        with pytest.raises(ConfigError, match="mu"):
            tiny_cfg(tmp_path, solvers=["pl-svrg"]).validate()

    def test_manual_plan_needs_parameters(self, tmp_path):
        with pytest.raises(ConfigError, match="manual"):
            tiny_cfg(tmp_path, plan_mode="manual").validate()

    def test_seed_spec_parsing(self):
        assert parse_seed_spec("1..4") == [1, 2, 3, 4]
        assert parse_seed_spec("3,5,9") == [3, 5, 9]
        assert parse_seed_spec("7") == [7]

    def test_kv_parsing(self):
        out = parse_kv_pairs("n=512,d=20,normalize=true,lam=0.01")
        assert out == {"n": 512, "d": 20, "normalize": True, "lam": 0.01}
        with pytest.raises(ConfigError):
            parse_kv_pairs("n:512")

    def test_config_file_loading(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("solver=proxsgd\npasses=5\n# comment\neta0=0.2\n")
        values = load_config(str(path))
        assert values == {"solver": "proxsgd", "passes": "5", "eta0": "0.2"}
        bad = tmp_path / "bad.cfg"
        bad.write_text("just a line\n")
        with pytest.raises(ConfigError):
            load_config(str(bad))


class TestBaseline:
    def test_2d_uses_exact_sweep(self, tmp_path):
        cfg = tiny_cfg(tmp_path, synthetic={"n": 16, "d": 2})
        from proxvr.bench import build_problem
        from proxvr import grid_optimum_2d

        p = build_problem(cfg)
        val = compute_baseline(p, cache_dir=str(tmp_path))
        _, want = grid_optimum_2d(p)
        assert val == pytest.approx(want, abs=1e-12)

    def test_cache_round_trip(self, tmp_path):
        p = make_synthetic_nnpca(RngStream(5), 16, 3)
        first = compute_baseline(p, cache_dir=str(tmp_path), iters=300, starts=2)
        assert os.path.exists(tmp_path / "baseline_cache.json")
        second = compute_baseline(p, cache_dir=str(tmp_path), iters=300, starts=2)
        assert first == second

    def test_baseline_below_any_quick_run(self, tmp_path):
        p = make_synthetic_nnpca(RngStream(6), 24, 3)
        base = compute_baseline(p, cache_dir=None, iters=2000, starts=3)
        from proxvr import prox_gd

        q = p.replicate()
        out = prox_gd(q, np.full(3, 1.0 / math.sqrt(3.0)), 1.0 / (2 * p.L), 50)
        with q.counters.paused():
            assert base <= q.F_value(out.x_last) + 1e-12


class TestWarmStart:
    def test_warm_start_costs_and_table(self):
        p = make_synthetic_nnpca(RngStream(7), 20, 3)
        x0 = np.full(3, 1.0 / math.sqrt(3.0))
        x_w, last_grad = run_warm_start(p, x0, RngStream(8), eta0=0.05)
        assert p.counters.snapshot() == (p.n, p.n)
        assert p.h.value(x_w) == 0.0  # stays feasible
        table = saga_table_from_warm(p, x_w, last_grad)
        extra = p.n - len(last_grad)
        assert p.counters.snapshot() == (p.n + extra, p.n)
        with p.counters.paused():
            for i, g in last_grad.items():
                assert np.array_equal(table[i], g)
            for i in range(p.n):
                if i not in last_grad:
                    assert np.allclose(table[i], p.grad_batch([i], x_w)[0],
                                       atol=1e-15)


class TestRunExperiment:
    def test_identical_configs_identical_csv_bytes(self, tmp_path):
        for sub in ("a", "b"):
            os.makedirs(tmp_path / sub)
            cfg = tiny_cfg(tmp_path / sub, trace_path="out.csv",
                           solvers=["proxsvrg", "proxsgd"])
            run_experiment(cfg)
        a = (tmp_path / "a" / "out.csv").read_bytes()
        b = (tmp_path / "b" / "out.csv").read_bytes()
        assert a == b

    def test_each_seed_gets_a_trace(self, tmp_path):
        cfg = tiny_cfg(tmp_path, seeds=[1, 2, 3])
        traces, summary = run_experiment(cfg)
        assert len(traces) == 3
        assert {t.metadata["seed"] for t in traces} == {1, 2, 3}
        assert len(summary) == 1

    def test_passes_budget_reached(self, tmp_path):
        cfg = tiny_cfg(tmp_path, passes=6.0, seeds=[1])
        traces, _ = run_experiment(cfg)
        assert traces[0].final().passes >= 6.0

    def test_warm_start_flag_runs(self, tmp_path):
        cfg = tiny_cfg(tmp_path, warm_start=True, solvers=["proxsaga"], seeds=[1])
        traces, _ = run_experiment(cfg)
        assert traces[0].metadata["warm_start"]

    def test_pl_solvers_run_on_testbed(self, tmp_path):
        cfg = tiny_cfg(tmp_path, solvers=["pl-svrg", "pl-saga"], synthetic=None,
                       pl_testbed={"n": 27, "d": 3, "lam": 0.01}, passes=30.0,
                       seeds=[1])
        traces, summary = run_experiment(cfg)
        assert len(traces) == 2
        # linear convergence should leave a tiny gap
        assert all(t.final().subopt < 1e-3 for t in traces)

    def test_summary_permutation_invariant(self, tmp_path):
        cfg1 = tiny_cfg(tmp_path, seeds=[1, 2, 3])
        cfg2 = tiny_cfg(tmp_path, seeds=[3, 1, 2])
        _, s1 = run_experiment(cfg1)
        _, s2 = run_experiment(cfg2)
        assert np.array_equal(s1[0][2], s2[0][2])

    def test_env_var_out_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("PROXVR_OUT_DIR", str(tmp_path / "envout"))
        cfg = tiny_cfg(None, out_dir=None, trace_path="t.csv", seeds=[1])
        run_experiment(cfg)
        assert os.path.exists(tmp_path / "envout" / "t.csv")


class TestCsv:
    def _trace(self):
        t = RunTrace(metadata={"solver": "proxgd", "seed": 4})
        t.record(0.0, 0, 0, 1.25, 0.25, 0.5)
        return t

    def test_single_checkpoint_two_lines(self, tmp_path):
        path = str(tmp_path / "one.csv")
        emit_csv([self._trace()], path)
        lines = open(path).read().split("\n")
        assert lines[0] == "solver,seed,passes,ifo,po,F,subopt,gmap_sq"
        assert len(lines) == 3 and lines[2] == ""

    def test_round_trip_exact(self, tmp_path):
        t = self._trace()
        t.record(1.0, 32, 1, 1.0 / 3.0, 1e-17, 0.1234567890123456789)
        path = str(tmp_path / "rt.csv")
        emit_csv([t], path)
        back = read_csv(path)
        assert len(back) == 1
        for a, b in zip(t.records, back[0].records):
            assert a.passes == b.passes and a.ifo == b.ifo and a.po == b.po
            assert a.F == b.F and a.gmap_sq == b.gmap_sq
            assert a.subopt == b.subopt

    def test_unknown_subopt_round_trips(self, tmp_path):
        t = RunTrace(metadata={"solver": "proxgd", "seed": 1})
        t.record(0.0, 0, 0, 2.0, None, 0.0)
        path = str(tmp_path / "none.csv")
        emit_csv([t], path)
        assert read_csv(path)[0].records[0].subopt is None

    def test_empty_trace_set_rejected(self, tmp_path):
        path = str(tmp_path / "never.csv")
        with pytest.raises(ValueError):
            emit_csv([], path)
        assert not os.path.exists(path)

    def test_lf_line_endings(self, tmp_path):
        path = str(tmp_path / "lf.csv")
        emit_csv([self._trace()], path)
        raw = open(path, "rb").read()
        assert b"\r" not in raw


class TestSvg:
    def test_two_point_polyline(self, tmp_path):
        path = str(tmp_path / "plot.svg")
        emit_svg([("proxgd", np.array([0.0, 1.0]), np.array([1.0, 0.1]))], path)
        tree = ET.parse(path)  # well-formed XML
        polylines = [el for el in tree.iter() if el.tag.endswith("polyline")]
        assert len(polylines) == 1
        points = polylines[0].get("points").split()
        assert len(points) == 2

    def test_monotone_series_maps_monotone_screen(self):
        to_screen = svg_transform((0.0, 10.0), (-4.0, 0.0))
        vals = [0.0, -1.0, -2.5, -4.0]  # decreasing log values
        ys = [to_screen(p, v)[1] for p, v in zip([0, 2, 5, 10], vals)]
        assert all(b > a for a, b in zip(ys, ys[1:]))

    def test_multi_solver_legend(self, tmp_path):
        path = str(tmp_path / "multi.svg")
        emit_svg([
            ("proxsvrg", np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.1, 0.01])),
            ("proxsgd", np.array([0.0, 1.0, 2.0]), np.array([1.0, 0.5, 0.2])),
        ], path)
        tree = ET.parse(path)
        polylines = [el for el in tree.iter() if el.tag.endswith("polyline")]
        assert len(polylines) == 2
        texts = [el.text for el in tree.iter() if el.tag.endswith("text")]
        assert "proxsvrg" in texts and "proxsgd" in texts

    def test_zero_suboptimality_is_floored(self, tmp_path):
        path = str(tmp_path / "floor.svg")
        emit_svg([("proxgd", np.array([0.0, 1.0]), np.array([1.0, 0.0]))], path)
        ET.parse(path)

    def test_empty_summary_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            emit_svg([], str(tmp_path / "no.svg"))


class TestTune:
    def test_grid_search_returns_best(self, tmp_path):
        cfg = tiny_cfg(tmp_path, solvers=["proxsgd"], seeds=[1, 2])
        (eta0, eta_prime), results = tune_sgd(
            cfg, eta0_grid=[0.2, 0.05], eta_prime_grid=[0.0, 1.0],
            tune_passes=2.0)
        assert (eta0, eta_prime, min(r[2] for r in results)) in results
        assert len(results) == 4
