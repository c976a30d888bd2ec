# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot loop.

Mirrors ``_pivot_py`` operation for operation; compiled with
``-ffp-contract=off`` so eliminations produce bit-identical floats.
"""

OPTIMAL = 0
UNBOUNDED = 1
MAXITER = 2
NUMERICAL = 3

cdef double REL_PIVOT = 1e-8
cdef Py_ssize_t STALL_LIMIT = 100


cpdef void pivot(double[:, ::1] t, long long[::1] basis, Py_ssize_t prow, Py_ssize_t pcol):
    cdef Py_ssize_t nrows = t.shape[0]
    cdef Py_ssize_t ncols = t.shape[1]
    cdef Py_ssize_t r, k
    cdef double pv = t[prow, pcol]
    cdef double f
    for k in range(ncols):
        t[prow, k] = t[prow, k] / pv
    t[prow, pcol] = 1.0
    for r in range(nrows):
        if r == prow:
            continue
        f = t[r, pcol]
        if f != 0.0:
            for k in range(ncols):
                t[r, k] = t[r, k] - f * t[prow, k]
            t[r, pcol] = 0.0
    basis[prow] = pcol


cpdef tuple run_simplex(
    double[:, ::1] t,
    long long[::1] basis,
    Py_ssize_t m,
    Py_ssize_t obj_row,
    Py_ssize_t n_enter,
    double tol,
    double min_piv,
    Py_ssize_t max_iter,
):
    cdef Py_ssize_t iters = 0
    cdef Py_ssize_t rhs = t.shape[1] - 1
    cdef bint bland = False
    cdef Py_ssize_t stall = 0
    cdef Py_ssize_t stall_limit = STALL_LIMIT + m
    cdef Py_ssize_t j, i, prow
    cdef long long best_basis
    cdef double a, c, cbest, ratio, best_ratio, colmax, thr, before
    cdef bint seen_small
    while True:
        j = -1
        if bland:
            for i in range(n_enter):
                if t[obj_row, i] < -tol:
                    j = i
                    break
        else:
            cbest = 0.0
            for i in range(n_enter):
                c = t[obj_row, i]
                if c < cbest:
                    cbest = c
                    j = i
            if j >= 0 and cbest >= -tol:
                j = -1
        if j < 0:
            return OPTIMAL, iters
        colmax = 0.0
        for i in range(m):
            a = t[i, j]
            if a < 0.0:
                a = -a
            if a > colmax:
                colmax = a
        thr = REL_PIVOT * colmax
        if tol > thr:
            thr = tol
        prow = -1
        best_ratio = 0.0
        best_basis = 0
        seen_small = False
        for i in range(m):
            a = t[i, j]
            if a > thr:
                ratio = t[i, rhs] / a
                if prow < 0 or ratio < best_ratio or (ratio == best_ratio and basis[i] < best_basis):
                    prow = i
                    best_ratio = ratio
                    best_basis = basis[i]
            elif a > min_piv:
                seen_small = True
        if prow < 0:
            if seen_small:
                return NUMERICAL, iters
            return UNBOUNDED, iters
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
