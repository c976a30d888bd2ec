"""Minimum-finish-time scheduling on a mesh quadrant.

The quadrant is the right/down grid DAG rooted at the source corner.  Data
moves in parallel on distinct links; a node starts computing (and counts
as having started forwarding) once its whole inbound share has arrived.
The relaxed problem is a linear program over column shares, start/finish
times and per-link flows; the integer problem is attacked by rounding the
relaxed optimum and local search, every candidate being re-timed by an LP
solve with the shares pinned.

Entry points:

* :func:`solve_pmft` - three phases: relax, integerize, then single-move
  descent from the worst-finishing node to the best-finishing one.
* :func:`solve_heuristic` - two LP solves, circular rounding repair, one
  accept/reject improvement test.
* :func:`neighbor_search` - full one-unit-move neighbourhood descent.

Both solvers report cumulative simplex pivot counts, the efficiency
metric used by the experiment harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lp import LinearProgram, LpSolution, LpStatus, solve_lp
from .model import (
    MalformedNetwork,
    NetworkKind,
    NetworkModel,
    Schedule,
    SchedulerError,
    Task,
    Timing,
    validate_schedule,
)


class InfeasibleProblem(SchedulerError):
    """The (possibly pinned) program has no feasible schedule."""


@dataclass
class LpCounter:
    """Accumulates LP solve and pivot counts across a solver run."""

    solves: int = 0
    pivots: int = 0

    def record(self, sol: LpSolution) -> None:
        self.solves += 1
        self.pivots += sol.iterations


@dataclass(frozen=True)
class MeshProblem:
    """Variable layout of the relaxed program for one network/task pair.

    One LP column per column-share, start time, finish time, per-edge flow,
    and one for the overall finish; the maps below are a bijection onto
    ``range(num_vars)``.
    """

    net: NetworkModel
    task: Task
    cols_var: tuple[int, ...]
    start_var: tuple[int, ...]
    finish_var: tuple[int, ...]
    flow_var: dict[tuple[int, int], int]
    overall_var: int

    @property
    def num_vars(self) -> int:
        return self.overall_var + 1

    @classmethod
    def for_network(cls, net: NetworkModel, task: Task) -> "MeshProblem":
        if net.kind is not NetworkKind.MESH_QUADRANT:
            raise MalformedNetwork("mesh solver needs a quadrant mesh network")
        if len(net.sources) != 1:
            raise MalformedNetwork("mesh solver needs a single source")
        p = net.p
        cols = tuple(range(p))
        start = tuple(range(p, 2 * p))
        finish = tuple(range(2 * p, 3 * p))
        flow = {e: 3 * p + i for i, e in enumerate(net.edge_list)}
        return cls(net, task, cols, start, finish, flow, 3 * p + len(net.edge_list))

    def var_names(self) -> list[str]:
        names = [""] * self.num_vars
        for i in range(self.net.p):
            names[self.cols_var[i]] = f"cols_{i}"
            names[self.start_var[i]] = f"start_{i}"
            names[self.finish_var[i]] = f"finish_{i}"
        for (i, j), v in self.flow_var.items():
            names[v] = f"flow_{i}_{j}"
        names[self.overall_var] = "overall"
        return names


def build_relaxation(net: NetworkModel, task: Task) -> tuple[LinearProgram, MeshProblem]:
    """The relaxed program whose optimum equals the integer problem's bound.

    Constraints, in order: source start pinned to zero; one start
    inequality per link (a node starts no earlier than each inbound
    transfer completes); finish definitions; the source emits the whole
    ``2n^2`` payload; flow conservation delivers ``2*cols*n`` to every
    worker; storage rows where capacity is bounded; normalization; and the
    overall-finish envelope.  Flows exist only on topology links, so the
    zero-flow rule holds by construction.
    """
    prob = MeshProblem.for_network(net, task)
    n = task.n
    src = net.source
    lp = LinearProgram(prob.num_vars, names=prob.var_names())
    lp.objective[prob.overall_var] = 1.0
    lp.set_bounds(prob.cols_var[src], 0.0, 0.0)

    lp.add({prob.start_var[src]: 1.0}, "==", 0.0)
    for i in range(net.p):
        if i in net.sources:
            continue
        for j in net.in_edges[i]:
            lp.add(
                {
                    prob.start_var[i]: 1.0,
                    prob.start_var[j]: -1.0,
                    prob.flow_var[(j, i)]: -net.z(j, i) * net.t_cm,
                },
                ">=",
                0.0,
            )
    for i in range(net.p):
        lp.add(
            {
                prob.finish_var[i]: 1.0,
                prob.start_var[i]: -1.0,
                prob.cols_var[i]: -(n * n * net.w(i) * net.t_cp),
            },
            "==",
            0.0,
        )
    lp.add({prob.flow_var[(src, j)]: 1.0 for j in net.out_edges[src]}, "==", 2.0 * n * n)
    for i in range(net.p):
        if i in net.sources:
            continue
        coeffs = {prob.cols_var[i]: -2.0 * n}
        for j in net.in_edges[i]:
            coeffs[prob.flow_var[(j, i)]] = coeffs.get(prob.flow_var[(j, i)], 0.0) + 1.0
        for j in net.out_edges[i]:
            coeffs[prob.flow_var[(i, j)]] = coeffs.get(prob.flow_var[(i, j)], 0.0) - 1.0
        lp.add(coeffs, "==", 0.0)
    for i in range(net.p):
        if i in net.sources:
            continue
        cap = net.processors[i].storage
        if not math.isinf(cap):
            lp.add({prob.cols_var[i]: 2.0 * n}, "<=", cap - n * n)
    lp.add({prob.cols_var[i]: 1.0 for i in range(net.p)}, "==", float(n))
    for i in range(net.p):
        lp.add({prob.overall_var: 1.0, prob.finish_var[i]: -1.0}, ">=", 0.0)
    return lp, prob


def _earliest_timing(net: NetworkModel, task: Task, cols, flows) -> Timing:
    """Canonical timing of a flow schedule: every node starts the moment its
    slowest inbound transfer lands.

    The relaxed program only bounds starts from below, so its vertex can
    pad non-critical starts arbitrarily; replaying the flows removes the
    padding without changing the overall finish and makes the per-node
    finish times meaningful for the max/min selections of the integer
    repair and descent steps.
    """
    n = task.n
    start = [0.0] * net.p
    finish = [0.0] * net.p
    for i in net.topo_order():
        if i in net.sources:
            start[i] = 0.0
        else:
            start[i] = float(max(
                start[j] + flows.get((j, i), 0.0) * net.z(j, i) * net.t_cm
                for j in net.in_edges[i]
            ))
        finish[i] = float(start[i] + cols[i] * n * n * net.w(i) * net.t_cp)
    return Timing(start=tuple(start), finish=tuple(finish), overall=max(finish))


def extract_schedule(sol: LpSolution, prob: MeshProblem) -> tuple[Schedule, Timing]:
    """Schedule/Timing views of an optimal solution; validates invariants.

    Timing uses the earliest-start replay of the extracted flows, which
    reproduces the program's optimal finish.
    """
    if not sol.optimal:
        raise InfeasibleProblem(f"relaxed program ended {sol.status.value}")
    x = sol.values
    cols = tuple(float(x[v]) for v in prob.cols_var)
    flows = {
        e: float(x[v]) for e, v in sorted(prob.flow_var.items()) if x[v] > 1e-12
    }
    schedule = Schedule(cols=cols, flows=flows, mode="pccs")
    validate_schedule(prob.net, prob.task, schedule, rel_tol=1e-6)
    return schedule, _earliest_timing(prob.net, prob.task, cols, flows)


def resolve_fixed_cols(
    net: NetworkModel,
    task: Task,
    cols,
    counter: LpCounter | None = None,
) -> tuple[Timing, dict[tuple[int, int], float], float]:
    """Optimal timing and flows once the column shares are pinned.

    The shares need not sum to ``n`` (the rounding repair calls this with
    partial totals), so the normalization row is dropped and the source
    emits whatever the pinned demands require, which conservation implies.
    Raises :class:`InfeasibleProblem` when pinned loads break storage.
    """
    if net.kind is not NetworkKind.MESH_QUADRANT:
        raise MalformedNetwork("mesh solver needs a quadrant mesh network")
    n = task.n
    for i in range(net.p):
        if i in net.sources:
            continue
        cap = net.processors[i].storage
        if not math.isinf(cap) and 2.0 * cols[i] * n + n * n > cap:
            raise InfeasibleProblem(f"pinned load of node {i} exceeds its storage")

    p = net.p
    start = tuple(range(p))
    finish = tuple(range(p, 2 * p))
    flow = {e: 2 * p + i for i, e in enumerate(net.edge_list)}
    overall = 2 * p + len(net.edge_list)
    lp = LinearProgram(overall + 1)
    lp.objective[overall] = 1.0
    src = net.source
    lp.add({start[src]: 1.0}, "==", 0.0)
    for i in range(p):
        if i in net.sources:
            continue
        for j in net.in_edges[i]:
            lp.add(
                {start[i]: 1.0, start[j]: -1.0, flow[(j, i)]: -net.z(j, i) * net.t_cm},
                ">=",
                0.0,
            )
    for i in range(p):
        load = cols[i] * n * n * net.w(i) * net.t_cp
        lp.add({finish[i]: 1.0, start[i]: -1.0}, "==", load)
    for i in range(p):
        if i in net.sources:
            continue
        coeffs: dict[int, float] = {}
        for j in net.in_edges[i]:
            coeffs[flow[(j, i)]] = coeffs.get(flow[(j, i)], 0.0) + 1.0
        for j in net.out_edges[i]:
            coeffs[flow[(i, j)]] = coeffs.get(flow[(i, j)], 0.0) - 1.0
        lp.add(coeffs, "==", 2.0 * cols[i] * n)
    for i in range(p):
        lp.add({overall: 1.0, finish[i]: -1.0}, ">=", 0.0)

    sol = solve_lp(lp)
    if counter is not None:
        counter.record(sol)
    if not sol.optimal:
        raise InfeasibleProblem(f"pinned-share program ended {sol.status.value}")
    x = sol.values
    flows = {e: float(x[v]) for e, v in sorted(flow.items()) if x[v] > 1e-12}
    timing = _earliest_timing(net, task, cols, flows)
    return timing, flows, timing.overall


def _round_half_up(values) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=float) + 0.5).astype(np.int64)


def fix_integer_schedule(
    net: NetworkModel,
    task: Task,
    relaxed_cols,
    counter: LpCounter | None = None,
    trace: list | None = None,
) -> np.ndarray:
    """Round half-up, then walk the total back to ``n`` one column at a time.

    Each repair step re-times the current shares (an LP solve) and then
    takes one column from the worst-finishing holder (total too high) or
    gives one to the best-finishing worker (total too low).  Ties break
    toward the lowest node index; the source is never touched.
    """
    cols = _round_half_up(relaxed_cols)
    workers = [i for i in range(net.p) if i not in net.sources]
    for s in net.sources:
        cols[s] = 0
    n = task.n
    while int(cols.sum()) != n:
        timing, _, _ = resolve_fixed_cols(net, task, cols, counter)
        fin = timing.finish
        if int(cols.sum()) > n:
            pick = max((i for i in workers if cols[i] > 0), key=lambda i: (fin[i], -i))
            cols[pick] -= 1
            op = "drop"
        else:
            pick = min(workers, key=lambda i: (fin[i], i))
            cols[pick] += 1
            op = "add"
        if trace is not None:
            trace.append(
                {"phase": "integerize", "op": op, "node": pick, "total": int(cols.sum())}
            )
    return cols


@dataclass(frozen=True)
class MeshResult:
    """Outcome of a mesh solver run with its LP bookkeeping."""

    schedule: Schedule
    timing: Timing
    iterations: int
    lp_solves: int
    core_lp_solves: int | None = None
    trace: tuple = ()


def _result(
    net: NetworkModel,
    task: Task,
    cols,
    timing: Timing,
    flows,
    counter: LpCounter,
    trace,
    core_solves: int | None = None,
) -> MeshResult:
    schedule = Schedule(cols=tuple(int(c) for c in cols), flows=flows, mode="pccs")
    validate_schedule(net, task, schedule)
    return MeshResult(
        schedule=schedule,
        timing=timing,
        iterations=counter.pivots,
        lp_solves=counter.solves,
        core_lp_solves=core_solves,
        trace=tuple(trace),
    )


def solve_relaxed(
    net: NetworkModel, task: Task, counter: LpCounter | None = None
) -> tuple[Schedule, Timing]:
    """Phase-I wrapper: build and solve the relaxation, extract the optimum."""
    lp, prob = build_relaxation(net, task)
    sol = solve_lp(lp)
    if counter is not None:
        counter.record(sol)
    return extract_schedule(sol, prob)


def solve_pmft(net: NetworkModel, task: Task) -> MeshResult:
    """Relax, integerize, then single-move descent (max-finish -> min-finish).

    The descent moves one column per iteration from the currently
    worst-finishing holder to the best-finishing worker and keeps the move
    only if the re-timed overall finish strictly improves; it stops at the
    first non-improving move.
    """
    counter = LpCounter()
    trace: list = []
    relaxed, _ = solve_relaxed(net, task, counter)
    trace.append({"phase": "relax", "cols": list(relaxed.cols)})
    cols = fix_integer_schedule(net, task, relaxed.cols, counter, trace)
    trace.append({"phase": "integerize", "cols": [int(c) for c in cols]})

    workers = [i for i in range(net.p) if i not in net.sources]
    timing, flows, t_cur = resolve_fixed_cols(net, task, cols, counter)
    while True:
        fin = timing.finish
        movable = [i for i in workers if cols[i] > 0]
        if not movable:
            break
        a = max(movable, key=lambda i: (fin[i], -i))
        b = min(workers, key=lambda i: (fin[i], i))
        if a == b:
            break
        cand = cols.copy()
        cand[a] -= 1
        cand[b] += 1
        try:
            cand_timing, cand_flows, t_cand = resolve_fixed_cols(net, task, cand, counter)
        except InfeasibleProblem:
            break
        improved = t_cand < t_cur
        trace.append(
            {"phase": "descent", "from": a, "to": b, "t_f": t_cand, "accepted": improved}
        )
        if not improved:
            break
        cols, timing, flows, t_cur = cand, cand_timing, cand_flows, t_cand
    return _result(net, task, cols, timing, flows, counter, trace)


def neighbor_search(
    net: NetworkModel,
    task: Task,
    start_cols,
    counter: LpCounter | None = None,
) -> tuple[np.ndarray, Timing]:
    """Full-neighbourhood descent over one-unit column moves.

    Every neighbour (one column moved between two distinct workers) is
    re-timed; the strictly best one is taken, repeating until the current
    schedule beats all neighbours.  Returns the final shares and timing.
    """
    counter = counter if counter is not None else LpCounter()
    cols = np.asarray(start_cols, dtype=np.int64).copy()
    workers = [i for i in range(net.p) if i not in net.sources]
    timing, _, t_cur = resolve_fixed_cols(net, task, cols, counter)
    while True:
        best = None
        for a in workers:
            if cols[a] <= 0:
                continue
            for b in workers:
                if b == a:
                    continue
                cand = cols.copy()
                cand[a] -= 1
                cand[b] += 1
                try:
                    cand_timing, _, t_cand = resolve_fixed_cols(net, task, cand, counter)
                except InfeasibleProblem:
                    continue
                if best is None or t_cand < best[0]:
                    best = (t_cand, cand, cand_timing)
        if best is None or best[0] >= t_cur:
            break
        t_cur, cols, timing = best
    return cols, timing


def solve_heuristic(net: NetworkModel, task: Task) -> MeshResult:
    """Two-LP-solve schedule: round, circular repair, one improvement test.

    The core solves the relaxation, rounds half-up, re-times the rounded
    shares once, and repairs any total mismatch by walking the workers
    sorted by finish time - forward adding columns when short, backward
    dropping them when over (skipping empty holders), wrapping circularly.
    That is exactly two LP solves.  A final single-neighbour test then
    moves one column from the worst to the best finisher and keeps it only
    if the re-timed finish improves (one LP solve, plus one more first if
    the repair changed the shares and the current timing must be refreshed).
    """
    counter = LpCounter()
    trace: list = []
    relaxed, _ = solve_relaxed(net, task, counter)
    trace.append({"phase": "relax", "cols": list(relaxed.cols)})
    cols = _round_half_up(relaxed.cols)
    for s in net.sources:
        cols[s] = 0
    rounded = cols.copy()
    timing, flows, t_cur = resolve_fixed_cols(net, task, cols, counter)
    core_solves = counter.solves

    workers = [i for i in range(net.p) if i not in net.sources]
    n = task.n
    diff = int(cols.sum()) - n
    order = sorted(workers, key=lambda i: (timing.finish[i], i))
    if diff < 0:
        idx = 0
        while diff < 0:
            cols[order[idx % len(order)]] += 1
            idx += 1
            diff += 1
    elif diff > 0:
        idx = len(order) - 1
        while diff > 0:
            node = order[idx % len(order)]
            if cols[node] > 0:
                cols[node] -= 1
                diff -= 1
            idx -= 1
    if not np.array_equal(cols, rounded):
        trace.append({"phase": "repair", "cols": [int(c) for c in cols]})
        timing, flows, t_cur = resolve_fixed_cols(net, task, cols, counter)

    fin = timing.finish
    movable = [i for i in workers if cols[i] > 0]
    if movable:
        a = max(movable, key=lambda i: (fin[i], -i))
        b = min(workers, key=lambda i: (fin[i], i))
        if a != b:
            cand = cols.copy()
            cand[a] -= 1
            cand[b] += 1
            try:
                cand_timing, cand_flows, t_cand = resolve_fixed_cols(
                    net, task, cand, counter
                )
            except InfeasibleProblem:
                t_cand = math.inf
            accepted = t_cand < t_cur
            trace.append(
                {"phase": "improve", "from": a, "to": b, "t_f": t_cand, "accepted": accepted}
            )
            if accepted:
                cols, timing, flows, t_cur = cand, cand_timing, cand_flows, t_cand
    return _result(net, task, cols, timing, flows, counter, trace, core_solves)
