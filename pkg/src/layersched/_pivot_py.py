"""Pure numpy simplex pivot loop (fallback backend).

Both backends implement the exact same procedure on the same tableau
layout so that pivot sequences, and therefore solutions and iteration
counts, are bit-identical:

* tableau ``t``: C-contiguous float64, columns ``0..ncols-2`` are variable
  columns and the last column is the right-hand side; rows ``0..m-1`` are
  constraints, row ``obj_row`` holds the reduced costs being minimised,
  and any further rows (extra cost rows) ride along through eliminations.
* entering column: most negative reduced cost below ``-tol`` (Dantzig,
  ties to the smallest index).  If the objective cell makes no progress
  for ``STALL_LIMIT + m`` consecutive pivots the rule switches to Bland's
  (smallest eligible index) for the rest of the run, which breaks cycles.
* leaving row: minimum ratio ``rhs/t[i,j]`` over rows whose entry exceeds
  ``max(tol, REL_PIVOT * max_i |t[i,j]|)``; the column-relative part keeps
  elimination debris out of the pivot seat (dividing by a near-zero debris
  entry wrecks the whole tableau).  Exact ratio ties break toward the
  smallest basic variable index.

Status codes: 0 optimal, 1 unbounded, 2 iteration limit, 3 numerical (the
column's only positive entries sit between ``min_piv`` and the admission
threshold, so no trustworthy pivot exists).
"""

from __future__ import annotations

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
MAXITER = 2
NUMERICAL = 3

REL_PIVOT = 1e-8
STALL_LIMIT = 100


def pivot(t: np.ndarray, basis: np.ndarray, prow: int, pcol: int) -> None:
    """One pivot: scale row ``prow`` and eliminate column ``pcol`` elsewhere."""
    t[prow, :] /= t[prow, pcol]
    t[prow, pcol] = 1.0
    factors = t[:, pcol].copy()
    factors[prow] = 0.0
    rows = np.nonzero(factors)[0]
    if rows.size:
        t[rows, :] -= factors[rows, None] * t[prow, :][None, :]
        t[rows, pcol] = 0.0
    basis[prow] = pcol


def run_simplex(
    t: np.ndarray,
    basis: np.ndarray,
    m: int,
    obj_row: int,
    n_enter: int,
    tol: float,
    min_piv: float,
    max_iter: int,
) -> tuple[int, int]:
    iters = 0
    rhs = t.shape[1] - 1
    bland = False
    stall = 0
    stall_limit = STALL_LIMIT + m
    while True:
        costs = t[obj_row, :n_enter]
        if bland:
            cand = np.nonzero(costs < -tol)[0]
            if cand.size == 0:
                return OPTIMAL, iters
            j = int(cand[0])
        else:
            j = int(np.argmin(costs)) if n_enter else 0
            if n_enter == 0 or costs[j] >= -tol:
                return OPTIMAL, iters
        col = t[:m, j]
        colmax = float(np.max(np.abs(col))) if m else 0.0
        thr = tol if tol > REL_PIVOT * colmax else REL_PIVOT * colmax
        good = np.nonzero(col > thr)[0]
        if good.size == 0:
            if np.any(col > min_piv):
                return NUMERICAL, iters
            return UNBOUNDED, iters
        ratios = t[good, rhs] / col[good]
        rmin = ratios.min()
        ties = good[ratios == rmin]
        prow = int(ties[np.argmin(basis[ties])])
        if iters >= max_iter:
            return MAXITER, iters
        before = t[obj_row, rhs]
        pivot(t, basis, prow, j)
        iters += 1
        if t[obj_row, rhs] > before:
            stall = 0
        else:
            stall += 1
            if stall >= stall_limit:
                bland = True
