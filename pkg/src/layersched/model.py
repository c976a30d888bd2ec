"""Domain model for layer-partitioned matrix multiplication scheduling.

The task is the multiplication of two dense N x N matrices.  Work is split
column-wise: a node assigned ``c`` columns receives the matching columns of
the left operand plus the matching rows of the right operand (``2*c*N``
entries) and performs ``c*N**2`` scalar multiplications, producing one full
N x N layer of the result.  Nothing here touches matrix data; the model
describes networks, load assignments, flows and timings only.

Networks are value objects.  Every node has an inverse computing speed
``w`` (seconds per unit load per intensity unit ``t_cp``) and every
directed link an inverse speed ``z`` (seconds per entry per ``t_cm``), so
moving ``v`` entries over a link costs ``v*z*t_cm`` seconds and computing
``l`` unit loads costs ``l*w*t_cp`` seconds.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import IO, Iterable, Mapping


class SchedulerError(Exception):
    """Base class for scheduling errors raised by this package."""


class MalformedNetwork(SchedulerError):
    """Network violates the structural rules of its kind."""


class NetworkKind(str, Enum):
    STAR = "Star"
    MESH_QUADRANT = "MeshQuadrant"
    FULL_MESH = "FullMesh"


@dataclass(frozen=True)
class Task:
    """A square matrix multiplication job of side length ``n``.

    ``n == 0`` is accepted as an explicit degenerate case (empty job, zero
    cost everywhere); all real workloads have ``n >= 1``.
    """

    n: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 0:
            raise ValueError(f"matrix side must be a non-negative integer, got {self.n!r}")


@dataclass(frozen=True)
class Processor:
    """A compute node: ``w`` is inverse speed, ``storage`` a capacity in entries."""

    id: int
    w: float
    storage: float = math.inf

    def __post_init__(self) -> None:
        if self.w <= 0:
            raise ValueError(f"processor {self.id}: inverse speed must be positive")
        if self.storage <= 0:
            raise ValueError(f"processor {self.id}: storage must be positive")


@dataclass(frozen=True)
class Link:
    """A directed link; ``z`` is inverse transfer speed per entry."""

    src: int
    dst: int
    z: float

    def __post_init__(self) -> None:
        if self.src == self.dst:
            raise ValueError(f"link {self.src}->{self.dst}: endpoints must differ")
        if self.z <= 0:
            raise ValueError(f"link {self.src}->{self.dst}: inverse speed must be positive")


@dataclass(frozen=True)
class NetworkModel:
    """A processor network with a fixed transmission topology.

    ``links`` define the direction indicator used everywhere else: data may
    flow from ``i`` to ``j`` iff a ``Link(i, j, ...)`` exists.  Processor
    ids are dense 0-based indices and the single source is id 0 by
    convention (enforced for the mesh quadrant kind).
    """

    kind: NetworkKind
    processors: tuple[Processor, ...]
    links: tuple[Link, ...]
    sources: frozenset[int]
    t_cp: float = 1.0
    t_cm: float = 1.0
    dims: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        self._validate()

    # -- structure ---------------------------------------------------------

    @property
    def p(self) -> int:
        """Total node count, source included."""
        return len(self.processors)

    @property
    def source(self) -> int:
        if len(self.sources) != 1:
            raise MalformedNetwork("network has no unique source")
        return next(iter(self.sources))

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], Link]:
        return {(l.src, l.dst): l for l in self.links}

    @cached_property
    def in_edges(self) -> dict[int, tuple[int, ...]]:
        inc: dict[int, list[int]] = {pr.id: [] for pr in self.processors}
        for l in self.links:
            inc[l.dst].append(l.src)
        return {i: tuple(sorted(js)) for i, js in inc.items()}

    @cached_property
    def out_edges(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {pr.id: [] for pr in self.processors}
        for l in self.links:
            out[l.src].append(l.dst)
        return {i: tuple(sorted(js)) for i, js in out.items()}

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        """All directed edges in canonical (src, dst) order."""
        return tuple(sorted(self.edge_index))

    def w(self, i: int) -> float:
        return self.processors[i].w

    def z(self, i: int, j: int) -> float:
        return self.edge_index[(i, j)].z

    @property
    def children(self) -> tuple[int, ...]:
        """Non-source node ids in ascending order."""
        return tuple(i for i in range(self.p) if i not in self.sources)

    def topo_order(self) -> tuple[int, ...]:
        """Kahn topological order of the link DAG; raises on cycles."""
        indeg = {pr.id: 0 for pr in self.processors}
        for l in self.links:
            indeg[l.dst] += 1
        ready = sorted(i for i, d in indeg.items() if d == 0)
        order: list[int] = []
        while ready:
            i = ready.pop(0)
            order.append(i)
            for j in self.out_edges[i]:
                indeg[j] -= 1
                if indeg[j] == 0:
                    # insertion keeps ready sorted for a deterministic order
                    lo = 0
                    while lo < len(ready) and ready[lo] < j:
                        lo += 1
                    ready.insert(lo, j)
        if len(order) != self.p:
            raise MalformedNetwork("link graph contains a cycle")
        return tuple(order)

    def grid_pos(self, i: int) -> tuple[int, int]:
        if self.dims is None:
            raise MalformedNetwork("network has no grid dimensions")
        return divmod(i, self.dims[1])

    # -- validation --------------------------------------------------------

    def _validate(self) -> None:
        ids = [pr.id for pr in self.processors]
        if ids != list(range(len(ids))):
            raise MalformedNetwork("processor ids must be dense 0-based indices")
        if not self.sources:
            raise MalformedNetwork("network needs at least one source")
        for s in self.sources:
            if not 0 <= s < self.p:
                raise MalformedNetwork(f"source id {s} out of range")
        seen = set()
        for l in self.links:
            if not (0 <= l.src < self.p and 0 <= l.dst < self.p):
                raise MalformedNetwork(f"link {l.src}->{l.dst} references unknown node")
            if (l.src, l.dst) in seen:
                raise MalformedNetwork(f"duplicate link {l.src}->{l.dst}")
            seen.add((l.src, l.dst))
        if self.kind is NetworkKind.STAR:
            self._validate_star()
        elif self.kind is NetworkKind.MESH_QUADRANT:
            self._validate_quadrant()
        elif self.kind is NetworkKind.FULL_MESH:
            self._validate_full_mesh()
        if self.kind is not NetworkKind.FULL_MESH:
            self._validate_reachability()

    def _validate_star(self) -> None:
        if len(self.sources) != 1:
            raise MalformedNetwork("star network needs exactly one source")
        src = next(iter(self.sources))
        expected = {(src, i) for i in range(self.p) if i != src}
        if set(self.edge_index) != expected:
            raise MalformedNetwork("star links must connect the source to every child")

    def _validate_quadrant(self) -> None:
        if self.dims is None:
            raise MalformedNetwork("mesh quadrant needs grid dimensions")
        rows, cols = self.dims
        if rows * cols != self.p:
            raise MalformedNetwork("grid dimensions do not match processor count")
        if self.sources != frozenset({0}):
            raise MalformedNetwork("mesh quadrant source must be node 0 at the grid corner")
        expected = set()
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                if c + 1 < cols:
                    expected.add((i, i + 1))
                if r + 1 < rows:
                    expected.add((i, i + cols))
        if set(self.edge_index) != expected:
            raise MalformedNetwork("mesh quadrant links must be the right/down grid edges")

    def _validate_full_mesh(self) -> None:
        if self.dims is None:
            raise MalformedNetwork("full mesh needs grid dimensions")
        rows, cols = self.dims
        if rows * cols != self.p:
            raise MalformedNetwork("grid dimensions do not match processor count")
        expected = set()
        for r in range(rows):
            for c in range(cols):
                i = r * cols + c
                if c + 1 < cols:
                    expected.add((i, i + 1))
                    expected.add((i + 1, i))
                if r + 1 < rows:
                    expected.add((i, i + cols))
                    expected.add((i + cols, i))
        if set(self.edge_index) != expected:
            raise MalformedNetwork("full mesh links must connect grid neighbours both ways")

    def _validate_reachability(self) -> None:
        seen = set(self.sources)
        frontier = list(self.sources)
        while frontier:
            i = frontier.pop()
            for j in self.out_edges[i]:
                if j not in seen:
                    seen.add(j)
                    frontier.append(j)
        if len(seen) != self.p:
            missing = sorted(set(range(self.p)) - seen)
            raise MalformedNetwork(f"nodes unreachable from the source: {missing}")


@dataclass(frozen=True)
class Schedule:
    """A load assignment: per-node column counts plus per-link flows.

    ``cols`` are real during relaxation and non-negative integers once
    final; ``flows`` maps directed edges to the number of matrix entries
    they carry.  Treat instances as immutable (the flows mapping included).
    """

    cols: tuple[float, ...] | tuple[int, ...]
    flows: Mapping[tuple[int, int], float]
    mode: str = "pccs"

    def source_volume(self, net: NetworkModel, task: Task):
        """Entries the source must emit: ``sum(2*c*n)``.

        Exact integer arithmetic whenever every column count is integral.
        """
        if all(isinstance(c, int) or float(c).is_integer() for c in self.cols):
            return sum(2 * int(c) * task.n for c in self.cols)
        return sum(2.0 * c * task.n for c in self.cols)

    def total_link_volume(self) -> float:
        return float(sum(self.flows.values()))


@dataclass(frozen=True)
class Timing:
    """Per-node start and finish times plus the overall finishing time."""

    start: tuple[float, ...]
    finish: tuple[float, ...]
    overall: float

    def __post_init__(self) -> None:
        for s, f in zip(self.start, self.finish):
            if f < s - 1e-12 * max(1.0, abs(s)):
                raise ValueError("node finishes before it starts")


# -- load and volume formulas ----------------------------------------------


def lbp_source_volume(task: Task):
    """Entries the source emits for a complete layered schedule: ``2*n**2``."""
    return 2 * task.n * task.n


def per_processor_volume(task: Task, cols_i):
    """Entries one node needs for ``cols_i`` columns: ``2*cols_i*n``."""
    _check_cols(task, cols_i)
    return 2 * cols_i * task.n


def compute_load(task: Task, cols_i):
    """Scalar multiplications for one layer of ``cols_i`` columns: ``cols_i*n**2``."""
    _check_cols(task, cols_i)
    return cols_i * task.n * task.n


def _check_cols(task: Task, cols_i) -> None:
    if not 0 <= cols_i <= task.n:
        raise ValueError(f"column count {cols_i} outside [0, {task.n}]")


def validate_schedule(
    net: NetworkModel,
    task: Task,
    schedule: Schedule,
    rel_tol: float = 1e-9,
) -> None:
    """Check the shared schedule invariants; raises ValueError on violation.

    A complete schedule assigns exactly ``n`` columns in total, gives the
    source none, and only puts flow on links the topology allows.
    """
    if len(schedule.cols) != net.p:
        raise ValueError("schedule length does not match processor count")
    total = sum(schedule.cols)
    if abs(total - task.n) > rel_tol * max(1.0, task.n):
        raise ValueError(f"column counts sum to {total}, expected {task.n}")
    tol = rel_tol * max(1.0, task.n)
    for s in net.sources:
        if abs(schedule.cols[s]) > tol:
            raise ValueError(f"source {s} must keep zero columns")
    for c in schedule.cols:
        if c < -tol:
            raise ValueError(f"negative column count {c}")
    for (i, j), vol in schedule.flows.items():
        if (i, j) not in net.edge_index:
            raise ValueError(f"flow on non-existent link {i}->{j}")
        if vol < -rel_tol:
            raise ValueError(f"negative flow on link {i}->{j}")


# -- network builders --------------------------------------------------------


def star_network(
    w: Iterable[float],
    z: Iterable[float],
    t_cp: float = 1.0,
    t_cm: float = 1.0,
    storage: Iterable[float] | None = None,
    source_w: float = 1.0,
) -> NetworkModel:
    """Star with source 0 and children 1..p in the given order.

    ``w[i]``/``z[i]`` belong to child ``i+1``; the source's own ``w`` is
    never used for computing and defaults to 1.
    """
    w = list(w)
    z = list(z)
    if len(w) != len(z):
        raise ValueError("need one link speed per child")
    stor = list(storage) if storage is not None else [math.inf] * len(w)
    procs = [Processor(0, source_w)]
    procs += [Processor(i + 1, wi, si) for i, (wi, si) in enumerate(zip(w, stor))]
    links = tuple(Link(0, i + 1, zi) for i, zi in enumerate(z))
    return NetworkModel(
        kind=NetworkKind.STAR,
        processors=tuple(procs),
        links=links,
        sources=frozenset({0}),
        t_cp=t_cp,
        t_cm=t_cm,
        dims=None,
    )


def quadrant_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Right/down grid edges in row-major scan order (the draw order)."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return edges


def quadrant_mesh(
    rows: int,
    cols: int,
    w: Iterable[float],
    z: Iterable[float] | Mapping[tuple[int, int], float],
    t_cp: float = 1.0,
    t_cm: float = 1.0,
    storage: Iterable[float] | None = None,
) -> NetworkModel:
    """Grid DAG rooted at node 0 (top-left), edges pointing right and down.

    ``z`` is either a mapping keyed by edge or a sequence matching
    ``quadrant_edges(rows, cols)`` order.
    """
    w = list(w)
    if len(w) != rows * cols:
        raise ValueError("need one speed per grid node")
    edges = quadrant_edges(rows, cols)
    if isinstance(z, Mapping):
        zmap = dict(z)
    else:
        z = list(z)
        if len(z) != len(edges):
            raise ValueError("need one link speed per grid edge")
        zmap = dict(zip(edges, z))
    stor = list(storage) if storage is not None else [math.inf] * len(w)
    procs = tuple(Processor(i, wi, si) for i, (wi, si) in enumerate(zip(w, stor)))
    links = tuple(Link(i, j, zmap[(i, j)]) for (i, j) in edges)
    return NetworkModel(
        kind=NetworkKind.MESH_QUADRANT,
        processors=procs,
        links=links,
        sources=frozenset({0}),
        t_cp=t_cp,
        t_cm=t_cm,
        dims=(rows, cols),
    )


def full_mesh_pairs(rows: int, cols: int) -> list[tuple[int, int]]:
    """Undirected neighbour pairs of the grid in row-major scan order."""
    pairs = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                pairs.append((i, i + 1))
            if r + 1 < rows:
                pairs.append((i, i + cols))
    return pairs


def full_mesh(
    rows: int,
    cols: int,
    w: Iterable[float],
    z: Iterable[float] | Mapping[tuple[int, int], float],
    t_cp: float = 1.0,
    t_cm: float = 1.0,
) -> NetworkModel:
    """Bidirectional grid; each physical link shares one speed both ways."""
    w = list(w)
    if len(w) != rows * cols:
        raise ValueError("need one speed per grid node")
    pairs = full_mesh_pairs(rows, cols)
    if isinstance(z, Mapping):
        zmap = dict(z)
    else:
        z = list(z)
        if len(z) != len(pairs):
            raise ValueError("need one link speed per grid pair")
        zmap = dict(zip(pairs, z))
    procs = tuple(Processor(i, wi) for i, wi in enumerate(w))
    links = []
    for (i, j) in pairs:
        links.append(Link(i, j, zmap[(i, j)]))
        links.append(Link(j, i, zmap[(i, j)]))
    return NetworkModel(
        kind=NetworkKind.FULL_MESH,
        processors=procs,
        links=tuple(links),
        sources=frozenset({0}),
        t_cp=t_cp,
        t_cm=t_cm,
        dims=(rows, cols),
    )


# -- JSON fixture format -----------------------------------------------------


def network_to_json(net: NetworkModel) -> dict:
    """Canonical JSON document for a network (the fixture format)."""
    doc: dict = {
        "kind": net.kind.value,
        "dims": list(net.dims) if net.dims is not None else None,
        "t_cp": net.t_cp,
        "t_cm": net.t_cm,
        "processors": [
            {
                "id": pr.id,
                "w": pr.w,
                "storage": None if math.isinf(pr.storage) else pr.storage,
            }
            for pr in net.processors
        ],
        "links": [{"from": l.src, "to": l.dst, "z": l.z} for l in net.links],
        "sources": sorted(net.sources),
    }
    return doc


def network_from_json(doc: Mapping) -> NetworkModel:
    kind = NetworkKind(doc["kind"])
    dims = tuple(doc["dims"]) if doc.get("dims") else None
    procs = tuple(
        Processor(
            int(pd["id"]),
            float(pd["w"]),
            math.inf if pd.get("storage") in (None, "") else float(pd["storage"]),
        )
        for pd in doc["processors"]
    )
    links = tuple(Link(int(ld["from"]), int(ld["to"]), float(ld["z"])) for ld in doc["links"])
    return NetworkModel(
        kind=kind,
        processors=procs,
        links=links,
        sources=frozenset(int(s) for s in doc["sources"]),
        t_cp=float(doc.get("t_cp", 1.0)),
        t_cm=float(doc.get("t_cm", 1.0)),
        dims=dims,
    )


def save_network(net: NetworkModel, fp: IO[str] | str) -> None:
    if isinstance(fp, str):
        with open(fp, "w", encoding="utf-8") as fh:
            json.dump(network_to_json(net), fh, indent=2)
            fh.write("\n")
    else:
        json.dump(network_to_json(net), fp, indent=2)
        fp.write("\n")


def load_network(fp: IO[str] | str) -> NetworkModel:
    if isinstance(fp, str):
        with open(fp, encoding="utf-8") as fh:
            return network_from_json(json.load(fh))
    return network_from_json(json.load(fp))
