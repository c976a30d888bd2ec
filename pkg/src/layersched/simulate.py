"""Deterministic schedule evaluation and random instance generation.

``evaluate_schedule`` replays a flow schedule over the topology DAG under
the parallel-link, consecutive-start timing model (each node starts once
its last inbound transfer completes); star schedules under the sequential
or simultaneous-start modes are timed by their own mode model instead.

``gen_network`` draws processor and link speeds i.i.d. uniform from
configured ranges with the intensity constants fixed at 1, so the drawn
values carry the full per-unit costs.  The same (kind, dims, seed, ranges)
always produces a bit-identical network; nothing reads ambient entropy.
"""

from __future__ import annotations

import numpy as np

from .model import (
    NetworkKind,
    NetworkModel,
    Schedule,
    Task,
    Timing,
    full_mesh,
    full_mesh_pairs,
    quadrant_edges,
    quadrant_mesh,
    star_network,
)

WTCP_RANGE = (0.0005, 0.0008)
ZTCM_RANGE = (0.0002, 0.0005)


def evaluate_schedule(
    net: NetworkModel, task: Task, schedule: Schedule
) -> tuple[Timing, float]:
    """Replay flows over the DAG; returns the timing and total link volume.

    Raises on cyclic topologies and on flows that fail conservation: every
    worker must absorb exactly ``2 * cols * n`` entries (inbound minus
    forwarded), within 1e-6.
    """
    order = net.topo_order()  # raises on cycles
    n = task.n
    flows = schedule.flows
    for (i, j) in flows:
        if (i, j) not in net.edge_index:
            raise ValueError(f"flow on non-existent link {i}->{j}")
    for i in range(net.p):
        if i in net.sources:
            continue
        absorbed = sum(flows.get((j, i), 0.0) for j in net.in_edges[i])
        absorbed -= sum(flows.get((i, j), 0.0) for j in net.out_edges[i])
        want = 2.0 * schedule.cols[i] * n
        if abs(absorbed - want) > 1e-6 * max(1.0, want):
            raise ValueError(
                f"node {i} absorbs {absorbed} entries, its share needs {want}"
            )

    start = [0.0] * net.p
    finish = [0.0] * net.p
    for i in order:
        if i in net.sources:
            start[i] = 0.0
        else:
            start[i] = max(
                (
                    start[j] + flows.get((j, i), 0.0) * net.z(j, i) * net.t_cm
                    for j in net.in_edges[i]
                ),
                default=0.0,
            )
        finish[i] = start[i] + schedule.cols[i] * n * n * net.w(i) * net.t_cp
    overall = max(finish) if finish else 0.0
    timing = Timing(start=tuple(start), finish=tuple(finish), overall=overall)
    return timing, float(sum(flows.values()))


def gen_network(
    kind: NetworkKind,
    dims,
    seed: int,
    wtcp_range: tuple[float, float] = WTCP_RANGE,
    ztcm_range: tuple[float, float] = ZTCM_RANGE,
) -> NetworkModel:
    """Draw a heterogeneous network of the given shape.

    ``dims`` is the child count for stars and (rows, cols) for meshes.
    Draw order is fixed: one speed per node in id order (the source's
    value is drawn too, though it never computes), then one per link in
    canonical scan order.
    """
    rng = np.random.default_rng(seed)
    lo_w, hi_w = wtcp_range
    lo_z, hi_z = ztcm_range
    if not (0 < lo_w < hi_w and 0 < lo_z < hi_z):
        raise ValueError("speed ranges must be positive with low < high")

    if kind is NetworkKind.STAR:
        p = int(dims[0]) if isinstance(dims, (tuple, list)) else int(dims)
        if p < 1:
            raise ValueError("star needs at least one child")
        w = rng.uniform(lo_w, hi_w, p + 1).tolist()
        z = rng.uniform(lo_z, hi_z, p).tolist()
        return star_network(w[1:], z, source_w=w[0])
    rows, cols = int(dims[0]), int(dims[1])
    if rows < 1 or cols < 1:
        raise ValueError("mesh dimensions must be positive")
    w = rng.uniform(lo_w, hi_w, rows * cols).tolist()
    if kind is NetworkKind.MESH_QUADRANT:
        z = rng.uniform(lo_z, hi_z, len(quadrant_edges(rows, cols))).tolist()
        return quadrant_mesh(rows, cols, w, z)
    if kind is NetworkKind.FULL_MESH:
        z = rng.uniform(lo_z, hi_z, len(full_mesh_pairs(rows, cols))).tolist()
        return full_mesh(rows, cols, w, z)
    raise ValueError(f"unknown network kind {kind!r}")
