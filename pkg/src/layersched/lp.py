"""Self-contained dense linear-program solver with pivot counting.

Minimises a linear objective subject to linear ``<=``/``==``/``>=``
constraints and per-variable bounds via a two-phase tableau simplex
(steepest reduced cost, switching to Bland's rule for anti-cycling when
progress stalls).  The pivot loop is the hot kernel: a compiled extension
is used when available and a pure numpy implementation otherwise; both
follow the identical pivot procedure so solutions and iteration counts
match bit for bit (see ``_pivot_py`` for the contract).

Solving the same program twice yields the same solution and the same
pivot count; the count is the efficiency metric reported upstream.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

import numpy as np

from . import _pivot_py
from .model import SchedulerError

try:
    from . import _pivot_core
except ImportError:  # extension not built; fall back to numpy
    _pivot_core = None

# Entering/pivot threshold on the equilibrated tableau.  1e-9 proved too
# tight: after a few hundred pivots the cost row carries elimination debris
# of a few 1e-9, which then demands entering columns that have no real
# pivot.  1e-7 on unit-scaled data clears that noise floor comfortably.
PIVOT_TOL = 1e-7
MIN_PIVOT = 1e-11
FEAS_TOL = 1e-7

_BACKENDS = {"python": _pivot_py}
if _pivot_core is not None:
    _BACKENDS["compiled"] = _pivot_core

DEFAULT_BACKEND = os.environ.get(
    "LAYERSCHED_BACKEND", "compiled" if _pivot_core is not None else "python"
)


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


class NumericalFailure(SchedulerError):
    """The simplex could not resolve a pivot within tolerance."""


class LpStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class Constraint:
    coeffs: dict[int, float]
    rel: str  # one of "<=", "==", ">="
    rhs: float

    def __post_init__(self) -> None:
        if self.rel not in ("<=", "==", ">="):
            raise ValueError(f"unknown relation {self.rel!r}")


@dataclass
class LinearProgram:
    """``minimize objective . x`` subject to constraints and bounds.

    Default bounds are ``[0, +inf)``; free variables are handled internally
    as a difference of two non-negatives.
    """

    num_vars: int
    objective: np.ndarray | None = None
    constraints: list[Constraint] = field(default_factory=list)
    bounds: list[tuple[float, float]] = field(default_factory=list)
    names: list[str] | None = None

    def __post_init__(self) -> None:
        if self.objective is None:
            self.objective = np.zeros(self.num_vars)
        self.objective = np.asarray(self.objective, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise ValueError("objective length must equal num_vars")
        if not self.bounds:
            self.bounds = [(0.0, math.inf)] * self.num_vars

    def add(self, coeffs: Mapping[int, float], rel: str, rhs: float) -> None:
        self.constraints.append(Constraint(dict(coeffs), rel, float(rhs)))

    def set_bounds(self, j: int, lo: float, hi: float) -> None:
        if lo > hi:
            raise ValueError(f"variable {j}: lower bound above upper bound")
        self.bounds[j] = (lo, hi)

    def name(self, j: int) -> str:
        if self.names is not None:
            return self.names[j]
        return f"x{j}"

    def validate(self) -> None:
        for con in self.constraints:
            for j in con.coeffs:
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"constraint references unknown variable {j}")
        for j, (lo, hi) in enumerate(self.bounds):
            if lo > hi:
                raise ValueError(f"variable {j}: lower bound above upper bound")
            if (math.isinf(lo) and lo > 0) or (math.isinf(hi) and hi < 0):
                raise ValueError(f"variable {j}: bounds must leave a finite range")


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: np.ndarray | None
    objective_value: float
    iterations: int

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def solve_lp(lp: LinearProgram, backend: str | None = None) -> LpSolution:
    """Solve to an optimal basic feasible solution, or report why not.

    Infeasible/unbounded programs come back as statuses; genuinely
    unresolvable pivots raise :class:`NumericalFailure`.
    """
    lp.validate()
    kern = _BACKENDS[backend or DEFAULT_BACKEND]
    form = _StandardForm(lp)
    t, basis = form.tableau()
    m = form.m
    max_iter = 50_000 + 50 * (m + form.n_struct)

    total_iters = 0
    if form.n_art:
        status, iters = kern.run_simplex(
            t, basis, m, m + 1, form.art0, PIVOT_TOL, MIN_PIVOT, max_iter
        )
        total_iters += iters
        # read the residual infeasibility off the basic artificials, not the
        # cost-row cell (the latter can drift)
        phase1_obj = sum(t[r, -1] for r in range(m) if basis[r] >= form.art0)
        converged = phase1_obj <= FEAS_TOL * max(1.0, form.rhs_scale)
        if status == _pivot_py.NUMERICAL and converged:
            pass  # feasible already; the stuck column was noise
        elif status != _pivot_py.OPTIMAL:
            raise NumericalFailure(f"phase-1 simplex ended with status {status}")
        if not converged:
            return LpSolution(LpStatus.INFEASIBLE, None, math.nan, total_iters)
        total_iters += _drive_out_artificials(kern, t, basis, form)
        keep = [r for r in range(m) if basis[r] < form.art0]
    else:
        keep = list(range(m))

    # Phase 2 works on a fresh tableau without artificial columns.
    rows = keep + [m]
    t2 = np.ascontiguousarray(
        np.hstack([t[np.ix_(rows, range(form.art0))], t[rows, -1:]])
    )
    basis2 = np.ascontiguousarray(basis[keep])
    m2 = len(keep)
    status, iters = kern.run_simplex(
        t2, basis2, m2, m2, form.art0, PIVOT_TOL, MIN_PIVOT, max_iter
    )
    total_iters += iters
    if status == _pivot_py.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, None, math.nan, total_iters)
    if status != _pivot_py.OPTIMAL:
        raise NumericalFailure(f"phase-2 simplex ended with status {status}")

    x = _certify(lp, form.extract(t2, basis2, m2, keep))
    obj = float(np.dot(lp.objective, x))
    return LpSolution(LpStatus.OPTIMAL, x, obj, total_iters)


def _drive_out_artificials(kern, t, basis, form: "_StandardForm") -> int:
    """Pivot basic artificials onto real columns; rows with none are redundant."""
    pivots = 0
    for r in range(form.m):
        if basis[r] < form.art0:
            continue
        rowmax = float(np.max(np.abs(t[r, : form.art0]))) if form.art0 else 0.0
        thr = max(PIVOT_TOL, _pivot_py.REL_PIVOT * rowmax)
        for j in range(form.art0):
            if abs(t[r, j]) > thr:
                kern.pivot(t, basis, r, j)
                pivots += 1
                break
    return pivots


def _certify(lp: LinearProgram, x: np.ndarray) -> np.ndarray:
    """Re-check the reported optimum against the original program.

    The 1e-7 slack is relative to the largest term in the row (absolute
    for rows whose terms are all of order one or less); bound checks are
    relative to the solution magnitude.  Bound violations inside the slack
    are clamped away so callers see clean values.
    """
    for con in lp.constraints:
        lhs = sum(c * x[j] for j, c in con.coeffs.items())
        scale = max(
            1.0, abs(con.rhs), max((abs(c * x[j]) for j, c in con.coeffs.items()), default=0.0)
        )
        slack = FEAS_TOL * scale
        ok = (
            lhs <= con.rhs + slack
            if con.rel == "<="
            else lhs >= con.rhs - slack
            if con.rel == ">="
            else abs(lhs - con.rhs) <= slack
        )
        if not ok:
            raise NumericalFailure(
                f"solution violates constraint ({con.rel} {con.rhs}): lhs={lhs}"
            )
    vscale = max(1.0, float(np.max(np.abs(x))) if len(x) else 0.0)
    slack = FEAS_TOL * vscale
    for j, (lo, hi) in enumerate(lp.bounds):
        if x[j] < lo - slack or x[j] > hi + slack:
            raise NumericalFailure(f"solution violates bounds of {lp.name(j)}")
        x[j] = min(max(x[j], lo), hi)
    return x


class _StandardForm:
    """Rewrites the program over non-negative variables and builds the tableau.

    Column layout: structural columns first, then one slack/surplus per
    inequality row, then artificials, then the right-hand side.  Rows keep
    the order constraints were added in, followed by upper-bound rows for
    variables with finite upper bounds; determinism depends on this.

    Columns and rows are equilibrated to unit maximum by powers of two
    (exact in floating point) before slacks are attached, and the
    right-hand side is normalised the same way (the solution scales back
    linearly), so the pivot tolerances see well-scaled numbers no matter
    how wildly the original coefficients differ in magnitude.  Without
    this, elimination debris can sneak past the pivot tolerance on badly
    mixed scales and a near-zero pivot then wrecks the tableau.
    """

    def __init__(self, lp: LinearProgram) -> None:
        self.lp = lp
        self.col_of: list[tuple] = []  # per original var: ("shift",col,lo) etc.
        n = 0
        extra_rows: list[Constraint] = []
        for j, (lo, hi) in enumerate(lp.bounds):
            if math.isinf(lo) and lo < 0:
                if math.isinf(hi):
                    self.col_of.append(("free", n, n + 1))
                    n += 2
                else:
                    self.col_of.append(("mirror", n, hi))
                    n += 1
            else:
                self.col_of.append(("shift", n, lo))
                if not math.isinf(hi) and hi > lo:
                    extra_rows.append(Constraint({j: 1.0}, "<=", hi))
                n += 1
            # fixed variables (lo == hi) keep a column bounded by a <= row
            if not math.isinf(lo) and lo == hi:
                extra_rows.append(Constraint({j: 1.0}, "<=", hi))
        self.n_struct = n
        self.rows = list(lp.constraints) + extra_rows
        self.m = len(self.rows)

    def _sub_row(self, con: Constraint) -> tuple[np.ndarray, str, float]:
        """Substitute the variable transforms into one constraint row."""
        coeffs = np.zeros(self.n_struct)
        rhs = con.rhs
        for j, c in con.coeffs.items():
            kind = self.col_of[j]
            if kind[0] == "shift":
                coeffs[kind[1]] += c
                rhs -= c * kind[2]
            elif kind[0] == "mirror":
                coeffs[kind[1]] -= c
                rhs -= c * kind[2]
            else:  # free
                coeffs[kind[1]] += c
                coeffs[kind[2]] -= c
        return coeffs, con.rel, rhs

    @staticmethod
    def _pow2_scale(mx: float) -> float:
        if mx <= 0.0 or not math.isfinite(mx):
            return 1.0
        return 2.0 ** -round(math.log2(mx))

    def tableau(self) -> tuple[np.ndarray, np.ndarray]:
        m, n = self.m, self.n_struct
        sub = [self._sub_row(con) for con in self.rows]
        a = np.array([coeffs for coeffs, _, _ in sub]).reshape(m, n)
        b = np.array([rhs for _, _, rhs in sub], dtype=float)
        rels = [rel for _, rel, _ in sub]

        self.cscale = np.ones(n)
        self.bscale = 1.0
        if m:
            bmax = float(np.max(np.abs(b)))
            if bmax > 0:
                self.bscale = 2.0 ** round(math.log2(bmax))
                b /= self.bscale
            for j in range(n):
                self.cscale[j] = self._pow2_scale(float(np.max(np.abs(a[:, j]))))
            a *= self.cscale[None, :]
            for r in range(m):
                rs = self._pow2_scale(float(np.max(np.abs(a[r, :]))))
                a[r, :] *= rs
                b[r] *= rs

        n_slack = sum(1 for rel in rels if rel != "==")
        # artificials appear where no slack can start basic
        art_rows = []
        slack_col: dict[int, tuple[int, float]] = {}
        sc = n
        for r, rel in enumerate(rels):
            neg = b[r] < 0
            if rel == "==":
                art_rows.append(r)
            elif rel == "<=":
                slack_col[r] = (sc, -1.0 if neg else 1.0)
                if neg:
                    art_rows.append(r)
                sc += 1
            else:  # ">="
                slack_col[r] = (sc, 1.0 if neg else -1.0)
                if not neg:
                    art_rows.append(r)
                sc += 1
        self.art0 = n + n_slack
        self.n_art = len(art_rows)
        ncols = self.art0 + self.n_art + 1
        t = np.zeros((m + 2, ncols))
        basis = np.full(m, -1, dtype=np.int64)

        art_of_row = {}
        for idx, r in enumerate(art_rows):
            art_of_row[r] = self.art0 + idx
        for r in range(m):
            sgn = -1.0 if b[r] < 0 else 1.0
            t[r, :n] = sgn * a[r, :]
            t[r, -1] = sgn * b[r]
            if r in slack_col:
                col, val = slack_col[r]
                t[r, col] = val
            if r in art_of_row:
                t[r, art_of_row[r]] = 1.0
                basis[r] = art_of_row[r]
            else:
                basis[r] = slack_col[r][0]
        self.rhs_scale = float(np.max(np.abs(b))) if m else 1.0
        # pristine copy of the system for the final basis re-solve
        self.a0 = t[:m, :-1].copy()
        self.b0 = t[:m, -1].copy()

        # phase-2 reduced costs (row m): structural costs only, basics cost 0
        obj = np.zeros(self.n_struct)
        for j, c in enumerate(self.lp.objective):
            kind = self.col_of[j]
            if kind[0] == "shift":
                obj[kind[1]] += c
            elif kind[0] == "mirror":
                obj[kind[1]] -= c
            else:
                obj[kind[1]] += c
                obj[kind[2]] -= c
        obj *= self.cscale
        obj *= self._pow2_scale(float(np.max(np.abs(obj))) if n else 0.0)
        t[m, :n] = obj

        # phase-1 reduced costs (row m+1): unit cost per artificial, reduced
        # against the artificial part of the starting basis
        if self.n_art:
            t[m + 1, self.art0 : self.art0 + self.n_art] = 1.0
            for r in art_rows:
                t[m + 1, :] -= t[r, :]
        return t, basis

    def extract(
        self, t: np.ndarray, basis: np.ndarray, m: int, keep: list[int]
    ) -> np.ndarray:
        """Solution in original variables from the final basis.

        The basic values are recomputed from the pristine (pre-pivot)
        system with one dense solve, which discards the elimination error
        the tableau accumulated; the tableau values are only a fallback.
        """
        values = t[:m, -1]
        if m:
            try:
                values = np.linalg.solve(
                    self.a0[np.ix_(keep, basis[:m])], self.b0[keep]
                )
            except np.linalg.LinAlgError:
                pass
        y = np.zeros(self.n_struct)
        for r in range(m):
            if basis[r] < self.n_struct:
                y[basis[r]] = values[r]
        y *= self.cscale * self.bscale  # undo the exact power-of-two scalings
        x = np.zeros(self.lp.num_vars)
        for j, kind in enumerate(self.col_of):
            if kind[0] == "shift":
                x[j] = kind[2] + y[kind[1]]
            elif kind[0] == "mirror":
                x[j] = kind[2] - y[kind[1]]
            else:
                x[j] = y[kind[1]] - y[kind[2]]
        return x


def format_lp(lp: LinearProgram) -> str:
    """Human-readable dump of the program (debug aid for the CLI)."""

    def term(c: float, j: int) -> str:
        return f"{c:+g} {lp.name(j)}"

    lines = []
    obj_terms = [term(c, j) for j, c in enumerate(lp.objective) if c != 0.0]
    lines.append("minimize: " + (" ".join(obj_terms) if obj_terms else "0"))
    lines.append("subject to:")
    for idx, con in enumerate(lp.constraints):
        lhs = " ".join(term(c, j) for j, c in sorted(con.coeffs.items()) if c != 0.0)
        rel = {"<=": "<=", "==": "=", ">=": ">="}[con.rel]
        lines.append(f"  c{idx}: {lhs or '0'} {rel} {con.rhs:g}")
    lines.append("bounds:")
    for j, (lo, hi) in enumerate(lp.bounds):
        if lo == 0.0 and math.isinf(hi):
            continue
        lo_s = "-inf" if math.isinf(lo) and lo < 0 else f"{lo:g}"
        hi_s = "+inf" if math.isinf(hi) else f"{hi:g}"
        lines.append(f"  {lo_s} <= {lp.name(j)} <= {hi_s}")
    return "\n".join(lines) + "\n"
