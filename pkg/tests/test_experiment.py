import io

import pytest

from layersched.experiment import (
    ExperimentConfig,
    format_aggregate_table,
    run_experiment,
    write_csv,
)
from layersched.model import NetworkKind


def star_config(**kw):
    base = dict(
        kind=NetworkKind.STAR,
        dims=(4,),
        ns=(16, 32),
        algorithms=("lbp-pccs", "even-col", "rect-lower-bound"),
        trials=2,
        seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            star_config(trials=0)
        with pytest.raises(ValueError):
            star_config(wtcp_range=(0.5, 0.1))
        with pytest.raises(ValueError):
            star_config(ns=())

    def test_kind_mismatch_rejected(self):
        with pytest.raises(ValueError):
            star_config(algorithms=("pmft",))
        with pytest.raises(ValueError):
            ExperimentConfig(
                kind=NetworkKind.MESH_QUADRANT,
                dims=(2, 2),
                ns=(8,),
                algorithms=("lbp-pccs",),
            )
        with pytest.raises(ValueError):
            ExperimentConfig(
                kind=NetworkKind.MESH_QUADRANT,
                dims=(2, 2),
                ns=(8,),
                algorithms=("summa",),
            )

    def test_from_dict(self):
        cfg = ExperimentConfig.from_dict(
            {
                "kind": "Star",
                "dims": 4,
                "ns": [10],
                "algorithms": ["lbp-pcss"],
                "trials": 3,
                "seed": 9,
            }
        )
        assert cfg.dims == (4,) and cfg.trials == 3


class TestRun:
    def test_row_counts_and_order(self):
        cfg = star_config(trials=1)
        report = run_experiment(cfg)
        assert len(report.rows) == len(cfg.algorithms) * len(cfg.ns)
        keys = [(r.algorithm, r.n, r.trial) for r in report.rows]
        assert keys == sorted(
            keys, key=lambda k: (cfg.algorithms.index(k[0]), cfg.ns.index(k[1]), k[2])
        )

    def test_star_volume_constant_per_n(self):
        report = run_experiment(star_config())
        for row in report.rows:
            if row.algorithm == "lbp-pccs":
                assert row.comm_volume == 2 * row.n * row.n

    def test_aggregate_is_arithmetic_mean(self):
        report = run_experiment(star_config())
        agg = {(a["algorithm"], a["N"]): a for a in report.aggregate()}
        for algo in report.config.algorithms:
            for n in report.config.ns:
                rows = [r for r in report.rows if r.algorithm == algo and r.n == n]
                vols = [r.comm_volume for r in rows if r.comm_volume is not None]
                assert agg[(algo, n)]["comm_volume"] == pytest.approx(
                    sum(vols) / len(vols)
                )

    def test_csv_deterministic(self):
        cfg = star_config()
        a, b = io.StringIO(), io.StringIO()
        write_csv(run_experiment(cfg), a)
        write_csv(run_experiment(cfg), b)
        assert a.getvalue() == b.getvalue()

    def test_csv_shape(self):
        cfg = star_config(trials=1)
        buf = io.StringIO()
        report = run_experiment(cfg)
        write_csv(report, buf)
        lines = buf.getvalue().strip().split("\n")
        header = lines[0].split(",")
        assert header == [
            "algorithm", "kind", "dims", "N", "trial",
            "comm_volume", "finish_time", "lp_iterations", "agg",
        ]
        raw = [l for l in lines[1:] if l.endswith(",0")]
        agg = [l for l in lines[1:] if l.endswith(",1")]
        assert len(raw) == len(cfg.algorithms) * len(cfg.ns)
        assert len(agg) == len(cfg.algorithms) * len(cfg.ns)

    def test_mesh_run_reports_iterations(self):
        cfg = ExperimentConfig(
            kind=NetworkKind.MESH_QUADRANT,
            dims=(2, 2),
            ns=(12,),
            algorithms=("pmft", "heuristic", "pipeline", "mpipeline"),
            trials=2,
            seed=0,
        )
        report = run_experiment(cfg)
        by_algo = {}
        for r in report.rows:
            by_algo.setdefault(r.algorithm, []).append(r)
        assert all(r.lp_iterations > 0 for r in by_algo["pmft"])
        assert all(r.lp_iterations is None for r in by_algo["pipeline"])
        table = format_aggregate_table(report)
        assert "pmft" in table and "mpipeline" in table

    def test_summa_runs_on_full_mesh(self):
        cfg = ExperimentConfig(
            kind=NetworkKind.FULL_MESH,
            dims=(3, 3),
            ns=(12,),
            algorithms=("summa",),
            trials=2,
            seed=0,
        )
        report = run_experiment(cfg)
        for r in report.rows:
            assert r.comm_volume == pytest.approx(2 * 12 * 12 * 2)
