"""Command-line front end.

Subcommands: ``star`` and ``mesh`` solve single instances, ``experiment``
runs a seeded sweep from a JSON config, ``lp-dump`` writes the relaxed
program of a mesh instance in readable form.  Networks are either drawn
from a seed or loaded from a JSON fixture (the fixture wins when both are
given).  Exit codes: 0 ok, 1 usage error, 2 star mode infeasible, 3 mesh
program infeasible.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import baselines, mesh, star
from .experiment import ExperimentConfig, format_aggregate_table, run_experiment, write_csv
from .lp import format_lp
from .model import (
    MalformedNetwork,
    NetworkKind,
    Task,
    load_network,
)
from .simulate import gen_network

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_STAR_INFEASIBLE = 2
EXIT_LP_INFEASIBLE = 3


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad flags; scripts here rely on 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="layersched", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_star = sub.add_parser("star", help="solve one star instance")
    p_star.add_argument("--children", type=int, help="number of children to draw")
    p_star.add_argument("--n", type=int, required=True, help="matrix side length")
    p_star.add_argument("--mode", choices=[m.value for m in star.StarMode], required=True)
    p_star.add_argument("--seed", type=int, default=0)
    p_star.add_argument("--network", help="JSON network fixture (overrides --children/--seed)")
    p_star.add_argument("--out", help="write per-node CSV here ('-' for stdout)")
    p_star.add_argument("--relaxed-only", action="store_true",
                        help="stop after the real-valued solution")

    p_mesh = sub.add_parser("mesh", help="solve one mesh instance")
    p_mesh.add_argument("--rows", type=int, help="grid rows to draw")
    p_mesh.add_argument("--cols", type=int, help="grid columns to draw")
    p_mesh.add_argument("--n", type=int, required=True)
    p_mesh.add_argument("--algo", choices=["pmft", "heuristic", "summa", "pipeline", "mpipeline"],
                        required=True)
    p_mesh.add_argument("--chunks", type=int, default=16,
                        help="chunk count for the modified pipeline")
    p_mesh.add_argument("--seed", type=int, default=0)
    p_mesh.add_argument("--network", help="JSON network fixture")
    p_mesh.add_argument("--out", help="write per-node CSV here ('-' for stdout)")
    p_mesh.add_argument("--verbose", action="store_true", help="stream phase traces")

    p_exp = sub.add_parser("experiment",
                           help="run a sweep from a JSON config")
    p_exp.add_argument("config", help="experiment config file")
    p_exp.add_argument("--out", help="CSV report path ('-' for stdout); "
                                     "defaults to <config>.csv")

    p_dump = sub.add_parser("lp-dump",
                            help="write the relaxed mesh program in text form")
    p_dump.add_argument("--rows", type=int)
    p_dump.add_argument("--cols", type=int)
    p_dump.add_argument("--n", type=int, required=True)
    p_dump.add_argument("--seed", type=int, default=0)
    p_dump.add_argument("--network")
    p_dump.add_argument("--out", help="output path ('-' or omitted for stdout)")
    return parser


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_node_csv(path, rows, summary):
    fp, close = _open_out(path)
    try:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["node", "cols", "start", "finish", "comm_volume", "t_f"])
        for node, cols, start, finish in rows:
            writer.writerow([node, cols, repr(float(start)), repr(float(finish)), "", ""])
        writer.writerow(["overall", summary["cols"], "", "",
                         repr(float(summary["comm_volume"])), repr(float(summary["t_f"]))])
    finally:
        if close:
            fp.close()


def _star_net(args):
    if args.network:
        net = load_network(args.network)
        if net.kind is not NetworkKind.STAR:
            raise _UsageError(f"{args.network} is not a star network")
        return net
    if not args.children or args.children < 1:
        raise _UsageError("need --children (or --network)")
    return gen_network(NetworkKind.STAR, args.children, args.seed)


def _cmd_star(args) -> int:
    net = _star_net(args)
    task = Task(args.n)
    mode = star.StarMode(args.mode)
    try:
        solution = star.solve_star(net, task, mode)
        if not args.relaxed_only:
            solution = star.integerize_star(net, task, mode, solution)
    except star.InfeasibleMode as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STAR_INFEASIBLE
    sched = star.star_schedule(net, task, solution, mode)
    volume = sched.source_volume(net, task)
    shares = [solution.cols[c] for c in net.children]
    print(f"mode={mode.value} children={len(net.children)} n={task.n}")
    print(f"k={shares}")
    for c in net.children:
        print(f"finish[{c}]={solution.per_node_finish[c]!r}")
    print(f"t_f={solution.t_f!r}")
    print(f"comm_volume={volume}")
    if args.out:
        starts = star.star_start_times(net, task, mode, solution.cols)
        rows = [(c, solution.cols[c], starts[c], solution.per_node_finish[c])
                for c in net.children]
        _write_node_csv(args.out, rows,
                        {"cols": sum(shares), "comm_volume": volume, "t_f": solution.t_f})
    return EXIT_OK


def _mesh_net(args, kind: NetworkKind):
    if args.network:
        net = load_network(args.network)
        if net.kind is not kind:
            raise _UsageError(f"{args.network} is not a {kind.value} network")
        return net
    if not args.rows or not args.cols:
        raise _UsageError("need --rows and --cols (or --network)")
    return gen_network(kind, (args.rows, args.cols), args.seed)


def _cmd_mesh(args) -> int:
    task = Task(args.n)
    if args.algo == "summa":
        net = _mesh_net(args, NetworkKind.FULL_MESH)
        volume, t_f = baselines.summa_cost(net, task)
        print(f"algo=summa dims={net.dims[0]}x{net.dims[1]} n={task.n}")
        print(f"t_f={t_f!r}")
        print(f"comm_volume={volume!r}")
        if args.out:
            _write_node_csv(args.out, [], {"cols": task.n, "comm_volume": volume, "t_f": t_f})
        return EXIT_OK

    net = _mesh_net(args, NetworkKind.MESH_QUADRANT)
    if args.algo in ("pipeline", "mpipeline"):
        chunks = 1 if args.algo == "pipeline" else max(2, args.chunks)
        cols_map, volume, t_f = baselines.pipeline_schedule(net, task, chunks=chunks)
        cols = [cols_map.get(i, 0) for i in range(net.p)]
        print(f"algo={args.algo} dims={net.dims[0]}x{net.dims[1]} n={task.n} chunks={chunks}")
        print(f"k={cols}")
        print(f"t_f={t_f!r}")
        print(f"comm_volume={volume!r}")
        if args.out:
            _write_node_csv(args.out, [(i, cols[i], 0.0, 0.0) for i in net.children],
                            {"cols": sum(cols), "comm_volume": volume, "t_f": t_f})
        return EXIT_OK

    solver = mesh.solve_pmft if args.algo == "pmft" else mesh.solve_heuristic
    try:
        result = solver(net, task)
    except mesh.InfeasibleProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LP_INFEASIBLE
    if args.verbose:
        for event in result.trace:
            print("trace: " + " ".join(f"{k}={v}" for k, v in event.items()))
    print(f"algo={args.algo} dims={net.dims[0]}x{net.dims[1]} n={task.n}")
    print(f"k={list(result.schedule.cols)}")
    print(f"t_f={result.timing.overall!r}")
    print(f"comm_volume={result.schedule.total_link_volume()!r}")
    print(f"lp_iterations={result.iterations}")
    print(f"lp_solves={result.lp_solves}")
    if args.out:
        rows = [(i, result.schedule.cols[i], result.timing.start[i], result.timing.finish[i])
                for i in range(net.p)]
        _write_node_csv(args.out, rows,
                        {"cols": sum(result.schedule.cols),
                         "comm_volume": result.schedule.total_link_volume(),
                         "t_f": result.timing.overall})
    return EXIT_OK


def _cmd_experiment(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            doc = json.load(fh)
        config = ExperimentConfig.from_dict(doc)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: bad experiment config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = run_experiment(config)
    out = args.out
    if out is None:
        out = args.config.removesuffix(".json") + ".csv"
    fp, close = _open_out(out)
    try:
        write_csv(report, fp)
    finally:
        if close:
            fp.close()
    print(format_aggregate_table(report), end="")
    return EXIT_OK


def _cmd_lp_dump(args) -> int:
    net = _mesh_net(args, NetworkKind.MESH_QUADRANT)
    lp, _ = mesh.build_relaxation(net, Task(args.n))
    fp, close = _open_out(args.out)
    try:
        fp.write(format_lp(lp))
    finally:
        if close:
            fp.close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "star":
            return _cmd_star(args)
        if args.command == "mesh":
            return _cmd_mesh(args)
        if args.command == "experiment":
            return _cmd_experiment(args)
        return _cmd_lp_dump(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MalformedNetwork, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except mesh.InfeasibleProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LP_INFEASIBLE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
