"""Comparison partitioners and cost models.

These are the yardsticks the layered scheme is measured against:

* rectangle-tiling volume formulas and their analytic lower bound,
* Even-Col (every child gets the same result columns, the whole left
  operand replicated to each),
* a SUMMA cost model on a full mesh (block grid, per-step pivot row and
  column relayed along the grid),
* Pipeline broadcasting on the quadrant DAG: with ``chunks == 1`` every
  node blindly forwards the whole payload to each neighbour (duplicates
  transmitted, receivers keep the first copy), with ``chunks > 1`` the
  modified variant subscribes each node to its earliest-arrival parent and
  pipelines the payload in equal chunks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import NetworkKind, NetworkModel, Task


@dataclass(frozen=True)
class Rect:
    height: float
    width: float

    def __post_init__(self) -> None:
        if self.height <= 0 or self.width <= 0:
            raise ValueError("rectangle sides must be positive")

    @property
    def area(self) -> float:
        return self.height * self.width


@dataclass(frozen=True)
class RectPartition:
    """A tiling of the n x n result matrix into one rectangle per node."""

    rects: tuple[Rect, ...]

    def check_tiles(self, n: int, rel_tol: float = 1e-9) -> None:
        total = sum(r.area for r in self.rects)
        if abs(total - n * n) > rel_tol * max(1.0, n * n):
            raise ValueError(f"rectangle areas sum to {total}, expected {n * n}")
        for r in self.rects:
            if r.height > n + 1e-12 or r.width > n + 1e-12:
                raise ValueError("rectangle exceeds the matrix side")


def rect_comm_volume(partition: RectPartition, n: int) -> float:
    """Entries sent for a rectangular tiling: ``sum((h_i + w_i) * n)``."""
    partition.check_tiles(n)
    return float(sum((r.height + r.width) * n for r in partition.rects))


def rect_lower_bound(areas, n: int) -> float:
    """Best volume any rectangular tiling of the given areas could reach.

    ``2n * sum(sqrt(s_i))``; equals the global bound ``2n^2`` only for a
    single tile and exceeds it strictly whenever two or more tiles have
    positive area.
    """
    areas = np.asarray(areas, dtype=float)
    if abs(float(areas.sum()) - n * n) > 1e-9 * max(1.0, n * n):
        raise ValueError(f"areas sum to {areas.sum()}, expected {n * n}")
    if np.any(areas < 0):
        raise ValueError("areas must be non-negative")
    return float(2.0 * n * np.sqrt(areas).sum())


def even_col_schedule(net: NetworkModel, task: Task) -> tuple[tuple[int, ...], float, float]:
    """Every child takes an equal slice of result columns.

    Each active child receives the whole left operand (``n^2`` entries)
    plus its own columns of the right one; with more children than
    columns, the extras idle and receive nothing.  Timing follows the
    parallel-link consecutive-start model.  Returns (per-child columns,
    total volume, finish time).
    """
    if net.kind is not NetworkKind.STAR:
        raise ValueError("even-col runs on a star network")
    children = net.children
    p = len(children)
    n = task.n
    base, extra = divmod(n, p)
    cols = tuple(base + (1 if i < extra else 0) for i in range(p))
    src = net.source
    volume = 0
    t_f = 0.0
    for i, c in enumerate(cols):
        if c == 0:
            continue
        child = children[i]
        vol_i = n * n + n * c
        volume += vol_i
        t_i = vol_i * net.z(src, child) * net.t_cm + c * n * n * net.w(child) * net.t_cp
        t_f = max(t_f, t_i)
    return cols, float(volume), t_f


def _balanced_split(n: int, q: int) -> list[int]:
    base, extra = divmod(n, q)
    return [base + (1 if i < extra else 0) for i in range(q)]


def summa_cost(net: NetworkModel, task: Task) -> tuple[float, float]:
    """Closed-form traffic and step-synchronous timing of block SUMMA.

    The matrices are block-distributed over a q x q full mesh (no single
    source).  In step ``s`` the pivot block column travels along every row
    and the pivot block row along every column by neighbour relay, so each
    grid link carries one block per step; the step then costs the slowest
    hop plus the slowest block update.  Total traffic is ``2 n^2 (q-1)``
    regardless of block sizes.
    """
    if net.kind is not NetworkKind.FULL_MESH:
        raise ValueError("the SUMMA model runs on a full mesh")
    rows, cols = net.dims
    if rows != cols:
        raise ValueError("the SUMMA model needs a square mesh")
    q = rows
    n = task.n
    if n == 0:
        return 0.0, 0.0
    heights = _balanced_split(n, q)  # result/left-operand block rows
    widths = _balanced_split(n, q)  # result/right-operand block columns
    inner = _balanced_split(n, q)  # pivot depth per step

    volume = 0.0
    t_f = 0.0
    for s in range(q):
        d = inner[s]
        if d == 0:
            continue
        hop_max = 0.0
        for r in range(q):
            a_block = heights[r] * d
            for c in range(q - 1):
                z = net.z(r * q + c, r * q + c + 1)
                hop_max = max(hop_max, a_block * z * net.t_cm)
                volume += a_block
        for c in range(q):
            b_block = d * widths[c]
            for r in range(q - 1):
                z = net.z(r * q + c, (r + 1) * q + c)
                hop_max = max(hop_max, b_block * z * net.t_cm)
                volume += b_block
        comp_max = 0.0
        for r in range(q):
            for c in range(q):
                work = heights[r] * d * widths[c]
                comp_max = max(comp_max, work * net.w(r * q + c) * net.t_cp)
        t_f += hop_max + comp_max
    return volume, t_f


def _speed_proportional_cols(net: NetworkModel, task: Task) -> dict[int, int]:
    """Split ``n`` columns over the workers proportionally to speed.

    Largest-remainder rounding, ties toward the lower node index.
    """
    workers = net.children
    n = task.n
    inv = np.array([1.0 / net.w(i) for i in workers])
    quota = n * inv / inv.sum()
    cols = np.floor(quota).astype(int)
    rem = quota - cols
    short = n - int(cols.sum())
    order = sorted(range(len(workers)), key=lambda i: (-rem[i], workers[i]))
    for i in order[:short]:
        cols[i] += 1
    return {wkr: int(c) for wkr, c in zip(workers, cols)}


def pipeline_schedule(
    net: NetworkModel, task: Task, chunks: int = 1
) -> tuple[dict[int, int], float, float]:
    """Broadcast the whole payload over the quadrant, then compute locally.

    Every worker ends up holding the full ``2 n^2`` entries and computes a
    speed-proportional share of columns.  ``chunks == 1`` is the classic
    flood: each node forwards the complete copy to every neighbour once it
    has one, so every link carries the payload and receivers discard
    duplicates.  ``chunks > 1`` is the modified variant: each node takes
    delivery from its earliest-finishing parent only (ties to the lower
    index) and the copy is cut into equal chunks relayed store-and-forward,
    so a node forwards one chunk while receiving the next.

    Returns (per-worker columns, total link volume, finish time).
    """
    if net.kind is not NetworkKind.MESH_QUADRANT:
        raise ValueError("pipeline runs on a quadrant mesh")
    if chunks < 1:
        raise ValueError("chunk count must be at least 1")
    n = task.n
    payload = 2 * n * n
    if n == 0:
        return {i: 0 for i in net.children}, 0.0, 0.0
    if chunks > payload:
        raise ValueError(f"{chunks} chunks would be empty for a {payload}-entry payload")

    src = net.source
    chunk = payload / chunks
    # arrival[i][m] = completion of chunk m at node i (source holds all at 0)
    arrival: dict[int, np.ndarray] = {src: np.zeros(chunks)}
    for i in net.topo_order():
        if i == src:
            continue
        best: np.ndarray | None = None
        for j in net.in_edges[i]:
            per_chunk = chunk * net.z(j, i) * net.t_cm
            cand = np.empty(chunks)
            t = 0.0
            for m in range(chunks):
                t = max(t, arrival[j][m]) + per_chunk
                cand[m] = t
            if best is None or cand[-1] < best[-1]:
                best = cand
        arrival[i] = best

    if chunks == 1:
        volume = float(len(net.links)) * payload  # flood: every link carries a copy
    else:
        volume = float(net.p - 1) * payload  # one delivery per worker

    cols = _speed_proportional_cols(net, task)
    t_f = 0.0
    for i in net.children:
        start = float(arrival[i][-1])
        t_f = max(t_f, start + cols[i] * n * n * net.w(i) * net.t_cp)
    return cols, volume, t_f
