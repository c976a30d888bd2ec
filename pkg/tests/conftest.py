"""Shared fixtures and brute-force oracles."""

from __future__ import annotations

import itertools

import pytest

from layersched.mesh import LpCounter, resolve_fixed_cols
from layersched.model import Task, quadrant_mesh, star_network


@pytest.fixture
def homog_pair_star():
    """Two identical children, unit speeds everywhere."""
    return star_network([1.0, 1.0], [1.0, 1.0])


@pytest.fixture
def fig_star():
    """Four children with computing powers 1, 1, 2, 4 (w is the inverse)."""
    return star_network([1.0, 1.0, 0.5, 0.25], [1.0, 1.0, 1.0, 1.0])


@pytest.fixture
def chain3():
    """source -> a -> b, all unit speeds."""
    return quadrant_mesh(1, 3, [1.0, 1.0, 1.0], [1.0, 1.0])


@pytest.fixture
def quad22():
    return quadrant_mesh(2, 2, [1.0] * 4, [1.0] * 4)


def compositions(total: int, slots: int):
    """All tuples of non-negative ints of length ``slots`` summing to ``total``."""
    if slots == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, slots - 1):
            yield (first,) + rest


def brute_force_best(net, task: Task):
    """Exhaustive integer optimum via re-timing every composition.

    Independent of the search heuristics: it enumerates the whole lattice.
    Returns (best finish time, best share tuple, number of candidates).
    """
    workers = net.children
    best_tf, best_cols = None, None
    count = 0
    for combo in compositions(task.n, len(workers)):
        cols = [0] * net.p
        for w, c in zip(workers, combo):
            cols[w] = c
        _, _, tf = resolve_fixed_cols(net, task, cols)
        count += 1
        if best_tf is None or tf < best_tf - 1e-12:
            best_tf, best_cols = tf, tuple(cols)
    return best_tf, best_cols, count


__all__ = ["compositions", "brute_force_best", "LpCounter", "itertools"]
