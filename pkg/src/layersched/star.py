"""Closed-form load balancing for star networks.

The source distributes column loads to ``p`` children under one of four
communication modes and the relaxed (real-valued) optimum makes every
child finish at the same instant.  Modes combine how the source talks to
children (Sequential: one link at a time, in index order / Parallel: all
links at once) with when a child may start computing (Simultaneous: while
still receiving / Consecutive: only after its full share arrived):

* SCSS - sequential communication, simultaneous start
* SCCS - sequential communication, consecutive start
* PCCS - parallel communication, consecutive start
* PCSS - parallel communication, simultaneous start

Each mode's equal-finish condition chains neighbouring children by a
constant ratio, so the relaxed solution is a telescoping product plus the
normalization ``sum(cols) == n``.  ``star_system`` exposes the same
conditions as a dense linear system for independent verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import NetworkModel, NetworkKind, Schedule, SchedulerError, Task, Timing


class StarMode(Enum):
    SCSS = "scss"
    SCCS = "sccs"
    PCCS = "pccs"
    PCSS = "pcss"

    @property
    def consecutive_start(self) -> bool:
        return self in (StarMode.SCCS, StarMode.PCCS)


class InfeasibleMode(SchedulerError):
    """A closed-form share came out non-positive for some child."""

    def __init__(self, mode: "StarMode", processor: int, message: str) -> None:
        super().__init__(message)
        self.mode = mode
        self.processor = processor


@dataclass(frozen=True)
class StarSolution:
    """Column shares with per-child finish times; relaxed or integral."""

    cols: tuple[float, ...]
    t_f: float
    per_node_finish: tuple[float, ...]


def _star_params(net: NetworkModel):
    if net.kind is not NetworkKind.STAR:
        raise ValueError("star solver needs a star network")
    children = net.children
    src = net.source
    w = np.array([net.w(c) for c in children])
    z = np.array([net.z(src, c) for c in children])
    return children, w, z


def _with_source_zero(net: NetworkModel, children, shares) -> tuple[float, ...]:
    cols = [0.0] * net.p
    for idx, c in enumerate(children):
        cols[c] = float(shares[idx])
    return tuple(cols)


def _share_ratios(mode: StarMode, n: int, w, z, t_cp: float, t_cm: float) -> np.ndarray:
    """ratio[i] = cols[i] / cols[i-1] for children i >= 1 (0-based)."""
    if mode is StarMode.SCSS:
        return (n * w[:-1] * t_cp - 2.0 * z[:-1] * t_cm) / (n * w[1:] * t_cp)
    if mode is StarMode.SCCS:
        return (n * w[:-1] * t_cp) / (n * w[1:] * t_cp + 2.0 * z[1:] * t_cm)
    if mode is StarMode.PCCS:
        return (n * w[:-1] * t_cp + 2.0 * z[:-1] * t_cm) / (n * w[1:] * t_cp + 2.0 * z[1:] * t_cm)
    return w[:-1] / w[1:]  # PCSS: shares proportional to speed


def solve_star(net: NetworkModel, task: Task, mode: StarMode) -> StarSolution:
    """Relaxed real-valued optimum: all children finish simultaneously.

    Raises :class:`InfeasibleMode` when a closed-form share is not
    positive, e.g. in SCSS when communication dominates computation for
    some child; the error names the offending child.
    """
    children, w, z = _star_params(net)
    p = len(children)
    n = task.n
    if p == 0:
        raise ValueError("star network has no children to schedule")
    if n == 0:
        zeros = (0.0,) * net.p
        return StarSolution(zeros, 0.0, zeros)

    ratios = _share_ratios(mode, n, w, z, net.t_cp, net.t_cm)
    rel = np.concatenate([[1.0], np.cumprod(ratios)])  # share relative to child 0
    first = n / rel.sum()
    shares = rel * first
    for idx, s in enumerate(shares):
        if s <= 0.0:
            raise InfeasibleMode(
                mode,
                children[idx],
                f"mode {mode.value} gives child {children[idx]} a non-positive "
                f"share ({s:g}); its communication dominates computation",
            )
    cols = _with_source_zero(net, children, shares)
    finish = star_finish_times(net, task, mode, cols)
    return StarSolution(cols, max(finish), finish)


def star_finish_times(
    net: NetworkModel, task: Task, mode: StarMode, cols
) -> tuple[float, ...]:
    """Per-node finish times of any (real or integer) share vector.

    Sequential modes transmit child shares in index order; a child in a
    consecutive-start mode computes only after its own transfer is done,
    in a simultaneous-start mode from the instant its transfer begins.
    """
    children, w, z = _star_params(net)
    n = task.n
    shares = np.array([cols[c] for c in children], dtype=float)
    comm = 2.0 * shares * n * z * net.t_cm
    comp = shares * n * n * w * net.t_cp
    if mode is StarMode.SCSS:
        start = np.concatenate([[0.0], np.cumsum(comm)[:-1]])
    elif mode is StarMode.SCCS:
        start = np.cumsum(comm)
    elif mode is StarMode.PCCS:
        start = comm
    else:  # PCSS
        start = np.zeros_like(comm)
    fin = start + comp
    finish = [0.0] * net.p
    for idx, c in enumerate(children):
        finish[c] = float(fin[idx])
    return tuple(finish)


def star_start_times(
    net: NetworkModel, task: Task, mode: StarMode, cols
) -> tuple[float, ...]:
    """Compute-start instants under the same timing model as finish times."""
    finish = star_finish_times(net, task, mode, cols)
    children, w, _ = _star_params(net)
    start = list(finish)
    for idx, c in enumerate(children):
        start[c] = finish[c] - cols[c] * task.n * task.n * w[idx] * net.t_cp
    for s in net.sources:
        start[s] = 0.0
    return tuple(start)


def star_system(
    net: NetworkModel, task: Task, mode: StarMode
) -> tuple[np.ndarray, np.ndarray]:
    """The mode's p x p linear system over child shares.

    Rows ``0..p-2`` equate neighbouring children's finish times, the last
    row is the normalization; solving it densely is the independent oracle
    for the closed forms.
    """
    children, w, z = _star_params(net)
    p = len(children)
    n = task.n
    tcp, tcm = net.t_cp, net.t_cm
    a = np.zeros((p, p))
    b = np.zeros(p)
    for r in range(p - 1):
        if mode is StarMode.SCSS:
            a[r, r] = n * n * w[r] * tcp - 2.0 * n * z[r] * tcm
            a[r, r + 1] = -(n * n * w[r + 1] * tcp)
        elif mode is StarMode.SCCS:
            a[r, r] = n * n * w[r] * tcp
            a[r, r + 1] = -(n * n * w[r + 1] * tcp + 2.0 * n * z[r + 1] * tcm)
        elif mode is StarMode.PCCS:
            a[r, r] = n * n * w[r] * tcp + 2.0 * n * z[r] * tcm
            a[r, r + 1] = -(n * n * w[r + 1] * tcp + 2.0 * n * z[r + 1] * tcm)
        else:
            a[r, r] = n * n * w[r] * tcp
            a[r, r + 1] = -(n * n * w[r + 1] * tcp)
    a[p - 1, :] = 1.0
    b[p - 1] = n
    return a, b


def verify_star(
    net: NetworkModel, task: Task, mode: StarMode, solution: StarSolution
) -> float:
    """Max absolute residual of a solution in the mode's linear system."""
    a, b = star_system(net, task, mode)
    shares = np.array([solution.cols[c] for c in net.children])
    return float(np.max(np.abs(a @ shares - b))) if len(shares) else 0.0


def integerize_star(
    net: NetworkModel, task: Task, mode: StarMode, relaxed: StarSolution
) -> StarSolution:
    """Round the relaxed shares half-up, then repair the total one unit at a time.

    While the total is short, the child with the smallest recomputed finish
    time takes one more column; while it overshoots, the child with the
    largest finish time (among those holding any) gives one up.  Finish
    times are recomputed from the mode's timing model after every unit.
    Ties break toward the lowest child index.
    """
    children, _, _ = _star_params(net)
    cols = [0] * net.p
    for c in children:
        cols[c] = max(0, int(np.floor(relaxed.cols[c] + 0.5)))
    n = task.n
    while sum(cols) != n:
        finish = star_finish_times(net, task, mode, cols)
        if sum(cols) < n:
            pick = min(children, key=lambda c: (finish[c], c))
            cols[pick] += 1
        else:
            holders = [c for c in children if cols[c] > 0]
            pick = max(holders, key=lambda c: (finish[c], -c))
            cols[pick] -= 1
    finish = star_finish_times(net, task, mode, cols)
    return StarSolution(tuple(cols), max(finish), finish)


def star_schedule(net: NetworkModel, task: Task, solution: StarSolution, mode: StarMode) -> Schedule:
    """Schedule view of a star solution: all flow goes source -> child."""
    src = net.source
    flows = {
        (src, c): 2.0 * solution.cols[c] * task.n for c in net.children if solution.cols[c]
    }
    return Schedule(cols=tuple(solution.cols), flows=flows, mode=mode.value)


def star_timing(net: NetworkModel, task: Task, mode: StarMode, solution: StarSolution) -> Timing:
    start = star_start_times(net, task, mode, solution.cols)
    finish = star_finish_times(net, task, mode, solution.cols)
    return Timing(start=start, finish=finish, overall=max(finish))
