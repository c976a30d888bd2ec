"""Experiment orchestration: seeded sweeps over matrix sizes and networks.

A configuration names a network family, the algorithms to compare, the
matrix sizes, and a seed; trial ``t`` of every data point runs on the
network drawn with ``seed + t``, so all algorithms of a config see the
same networks and rerunning a config reproduces the report byte for byte.

Reports are flat CSV, one row per (algorithm, N, trial) plus aggregate
rows flagged ``agg=1``; numbers are written at full precision.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import IO, Mapping

from . import baselines, mesh, star
from .model import NetworkKind, NetworkModel, Task
from .simulate import WTCP_RANGE, ZTCM_RANGE, gen_network

CSV_COLUMNS = (
    "algorithm",
    "kind",
    "dims",
    "N",
    "trial",
    "comm_volume",
    "finish_time",
    "lp_iterations",
    "agg",
)

STAR_ALGORITHMS = ("lbp-scss", "lbp-sccs", "lbp-pccs", "lbp-pcss", "even-col", "rect-lower-bound")
QUADRANT_ALGORITHMS = ("pmft", "heuristic", "pipeline", "mpipeline")
FULL_MESH_ALGORITHMS = ("summa",)


@dataclass(frozen=True)
class ExperimentConfig:
    kind: NetworkKind
    dims: tuple[int, ...]
    ns: tuple[int, ...]
    algorithms: tuple[str, ...]
    trials: int = 10
    seed: int = 0
    wtcp_range: tuple[float, float] = WTCP_RANGE
    ztcm_range: tuple[float, float] = ZTCM_RANGE
    chunks: int = 16

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("need at least one trial")
        for lo, hi in (self.wtcp_range, self.ztcm_range):
            if not (0 < lo < hi):
                raise ValueError("speed ranges must be positive with low < high")
        if not self.ns or any(n < 0 for n in self.ns):
            raise ValueError("matrix sizes must be non-negative")
        allowed = {
            NetworkKind.STAR: STAR_ALGORITHMS,
            NetworkKind.MESH_QUADRANT: QUADRANT_ALGORITHMS,
            NetworkKind.FULL_MESH: FULL_MESH_ALGORITHMS,
        }[self.kind]
        for algo in self.algorithms:
            if algo not in allowed:
                raise ValueError(
                    f"algorithm {algo!r} does not run on {self.kind.value} networks"
                )

    @classmethod
    def from_dict(cls, doc: Mapping) -> "ExperimentConfig":
        dims = doc["dims"]
        dims = (int(dims),) if isinstance(dims, (int, float)) else tuple(int(d) for d in dims)
        return cls(
            kind=NetworkKind(doc["kind"]),
            dims=dims,
            ns=tuple(int(n) for n in doc["ns"]),
            algorithms=tuple(doc["algorithms"]),
            trials=int(doc.get("trials", 10)),
            seed=int(doc.get("seed", 0)),
            wtcp_range=tuple(doc.get("wtcp_range", WTCP_RANGE)),
            ztcm_range=tuple(doc.get("ztcm_range", ZTCM_RANGE)),
            chunks=int(doc.get("chunks", 16)),
        )

    @property
    def dims_label(self) -> str:
        return "x".join(str(d) for d in self.dims)


@dataclass(frozen=True)
class TrialRow:
    algorithm: str
    kind: str
    dims: str
    n: int
    trial: int
    comm_volume: float | None
    finish_time: float | None
    lp_iterations: int | None


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    rows: tuple[TrialRow, ...]

    def aggregate(self) -> list[dict]:
        """Arithmetic means over trials, one record per (algorithm, N)."""
        out = []
        for algo in self.config.algorithms:
            for n in self.config.ns:
                group = [r for r in self.rows if r.algorithm == algo and r.n == n]
                out.append(
                    {
                        "algorithm": algo,
                        "kind": self.config.kind.value,
                        "dims": self.config.dims_label,
                        "N": n,
                        "comm_volume": _mean(r.comm_volume for r in group),
                        "finish_time": _mean(r.finish_time for r in group),
                        "lp_iterations": _mean(r.lp_iterations for r in group),
                    }
                )
        return out


def _mean(values) -> float | None:
    vals = [v for v in values if v is not None]
    if not vals:
        return None
    return sum(vals) / len(vals)


def _run_star_mode(mode: star.StarMode):
    def run(net: NetworkModel, task: Task, cfg: ExperimentConfig):
        relaxed = star.solve_star(net, task, mode)
        final = star.integerize_star(net, task, mode, relaxed)
        sched = star.star_schedule(net, task, final, mode)
        return float(sched.source_volume(net, task)), final.t_f, None

    return run


def _run_even_col(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    _, volume, t_f = baselines.even_col_schedule(net, task)
    return volume, t_f, None


def _run_rect_lower_bound(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    # bound for a rectangular tiling whose areas match the layered shares
    relaxed = star.solve_star(net, task, star.StarMode.PCCS)
    final = star.integerize_star(net, task, star.StarMode.PCCS, relaxed)
    areas = [c * task.n for c in final.cols if c > 0]
    return baselines.rect_lower_bound(areas, task.n), None, None


def _run_pmft(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    res = mesh.solve_pmft(net, task)
    return res.schedule.total_link_volume(), res.timing.overall, res.iterations


def _run_heuristic(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    res = mesh.solve_heuristic(net, task)
    return res.schedule.total_link_volume(), res.timing.overall, res.iterations


def _run_pipeline(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    _, volume, t_f = baselines.pipeline_schedule(net, task, chunks=1)
    return volume, t_f, None


def _run_mpipeline(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    _, volume, t_f = baselines.pipeline_schedule(net, task, chunks=max(2, cfg.chunks))
    return volume, t_f, None


def _run_summa(net: NetworkModel, task: Task, cfg: ExperimentConfig):
    volume, t_f = baselines.summa_cost(net, task)
    return volume, t_f, None


ALGORITHMS = {
    "lbp-scss": _run_star_mode(star.StarMode.SCSS),
    "lbp-sccs": _run_star_mode(star.StarMode.SCCS),
    "lbp-pccs": _run_star_mode(star.StarMode.PCCS),
    "lbp-pcss": _run_star_mode(star.StarMode.PCSS),
    "even-col": _run_even_col,
    "rect-lower-bound": _run_rect_lower_bound,
    "pmft": _run_pmft,
    "heuristic": _run_heuristic,
    "pipeline": _run_pipeline,
    "mpipeline": _run_mpipeline,
    "summa": _run_summa,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run every (algorithm, N, trial) cell; deterministic given the config."""
    nets = {
        t: gen_network(config.kind, config.dims, config.seed + t,
                       config.wtcp_range, config.ztcm_range)
        for t in range(config.trials)
    }
    rows = []
    for algo in config.algorithms:
        run = ALGORITHMS[algo]
        for n in config.ns:
            task = Task(n)
            for t in range(config.trials):
                volume, t_f, iters = run(nets[t], task, config)
                rows.append(
                    TrialRow(
                        algorithm=algo,
                        kind=config.kind.value,
                        dims=config.dims_label,
                        n=n,
                        trial=t,
                        comm_volume=volume,
                        finish_time=t_f,
                        lp_iterations=iters,
                    )
                )
    return ExperimentReport(config=config, rows=tuple(rows))


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(report: ExperimentReport, fp: IO[str]) -> None:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.rows:
        writer.writerow(
            [r.algorithm, r.kind, r.dims, r.n, r.trial,
             _cell(r.comm_volume), _cell(r.finish_time), _cell(r.lp_iterations), 0]
        )
    for a in report.aggregate():
        writer.writerow(
            [a["algorithm"], a["kind"], a["dims"], a["N"], "",
             _cell(a["comm_volume"]), _cell(a["finish_time"]), _cell(a["lp_iterations"]), 1]
        )


def format_aggregate_table(report: ExperimentReport) -> str:
    """Fixed-width text table of the per-(algorithm, N) means."""
    header = f"{'algorithm':<18} {'N':>6} {'comm_volume':>16} {'finish_time':>14} {'lp_iters':>10}"
    lines = [header, "-" * len(header)]
    for a in report.aggregate():
        vol = "-" if a["comm_volume"] is None else f"{a['comm_volume']:.6g}"
        tf = "-" if a["finish_time"] is None else f"{a['finish_time']:.6g}"
        it = "-" if a["lp_iterations"] is None else f"{a['lp_iterations']:.6g}"
        lines.append(f"{a['algorithm']:<18} {a['N']:>6} {vol:>16} {tf:>14} {it:>10}")
    return "\n".join(lines) + "\n"
