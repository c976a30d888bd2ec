import itertools
import math

import numpy as np
import pytest

from layersched.lp import (
    LinearProgram,
    LpStatus,
    format_lp,
    solve_lp,
)


def lp_min_x_ge_3():
    lp = LinearProgram(1, np.array([1.0]))
    lp.add({0: 1.0}, ">=", 3.0)
    return lp


class TestBasics:
    def test_single_bound_active(self):
        sol = solve_lp(lp_min_x_ge_3())
        assert sol.status is LpStatus.OPTIMAL
        assert sol.values[0] == pytest.approx(3.0, abs=1e-9)
        assert sol.objective_value == pytest.approx(3.0, abs=1e-9)

    def test_unit_simplex_facet(self):
        lp = LinearProgram(2, np.array([-1.0, -1.0]))
        lp.add({0: 1.0, 1: 1.0}, "<=", 1.0)
        sol = solve_lp(lp)
        assert sol.status is LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(-1.0, abs=1e-9)
        assert sol.values.sum() == pytest.approx(1.0, abs=1e-9)

    def test_equalized_envelopes(self):
        # minimize T with T >= 5x and T >= 10(1-x) meet at x=2/3, T=10/3
        lp = LinearProgram(2, np.array([0.0, 1.0]))
        lp.set_bounds(0, 0.0, 1.0)
        lp.add({1: 1.0, 0: -5.0}, ">=", 0.0)
        lp.add({1: 1.0, 0: 10.0}, ">=", 10.0)
        sol = solve_lp(lp)
        assert sol.values[0] == pytest.approx(2.0 / 3.0, abs=1e-9)
        assert sol.values[1] == pytest.approx(10.0 / 3.0, abs=1e-9)

    def test_infeasible_status(self):
        lp = LinearProgram(1, np.array([1.0]))
        lp.add({0: 1.0}, "<=", -1.0)
        sol = solve_lp(lp)
        assert sol.status is LpStatus.INFEASIBLE
        assert sol.values is None and math.isnan(sol.objective_value)

    def test_unbounded_status(self):
        lp = LinearProgram(1, np.array([-1.0]))
        assert solve_lp(lp).status is LpStatus.UNBOUNDED

    def test_equalities_and_negative_rhs(self):
        lp = LinearProgram(2, np.array([1.0, 1.0]))
        lp.add({0: 1.0, 1: 2.0}, "==", 4.0)
        lp.add({0: 1.0, 1: -1.0}, ">=", -1.0)
        sol = solve_lp(lp)
        assert sol.status is LpStatus.OPTIMAL
        assert sol.objective_value == pytest.approx(7.0 / 3.0, abs=1e-9)

    def test_free_variable_split(self):
        lp = LinearProgram(1, np.array([1.0]))
        lp.set_bounds(0, -math.inf, math.inf)
        lp.add({0: 1.0}, ">=", -5.0)
        sol = solve_lp(lp)
        assert sol.values[0] == pytest.approx(-5.0, abs=1e-9)

    def test_fixed_variable(self):
        lp = LinearProgram(2, np.array([0.0, 1.0]))
        lp.set_bounds(0, 2.0, 2.0)
        lp.add({1: 1.0, 0: -1.0}, ">=", 0.0)
        sol = solve_lp(lp)
        assert sol.values[0] == pytest.approx(2.0, abs=1e-9)
        assert sol.values[1] == pytest.approx(2.0, abs=1e-9)

    def test_validation(self):
        lp = LinearProgram(1, np.array([1.0]))
        lp.add({3: 1.0}, "<=", 1.0)
        with pytest.raises(ValueError):
            solve_lp(lp)
        with pytest.raises(ValueError):
            LinearProgram(2, np.array([1.0]))


class TestDeterminism:
    def test_identical_programs_identical_runs(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            n, m = 4, 5
            rows = [
                ({j: float(rng.normal()) for j in range(n)}, float(rng.uniform(0.5, 3)))
                for _ in range(m)
            ]
            c = rng.normal(size=n)

            def build():
                lp = LinearProgram(n, c.copy())
                for coeffs, rhs in rows:
                    lp.add(coeffs, "<=", rhs)
                return lp

            a = solve_lp(build())
            b = solve_lp(build())
            assert a.status == b.status
            assert a.iterations == b.iterations
            if a.status is LpStatus.OPTIMAL:
                assert np.array_equal(a.values, b.values)

    def test_iteration_count_positive(self):
        sol = solve_lp(lp_min_x_ge_3())
        assert sol.iterations >= 1


def enumerate_vertices(c, rows, bounds):
    """Independent optimum: intersect every n-subset of facets, keep the
    feasible points, take the best objective."""
    n = len(c)
    facets = [(np.array(coeffs), rhs) for coeffs, rhs in rows]
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        facets.append((e.copy(), bounds[j][0]))
        facets.append((e.copy(), bounds[j][1]))
    best = None
    for combo in itertools.combinations(range(len(facets)), n):
        a = np.array([facets[k][0] for k in combo])
        b = np.array([facets[k][1] for k in combo])
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        ok = all(np.dot(coeffs, x) <= rhs + 1e-9 for coeffs, rhs in rows)
        ok = ok and all(
            bounds[j][0] - 1e-9 <= x[j] <= bounds[j][1] + 1e-9 for j in range(n)
        )
        if ok:
            val = float(np.dot(c, x))
            if best is None or val < best:
                best = val
    return best


class TestVertexOracle:
    def test_random_small_lps_match_vertex_enumeration(self):
        rng = np.random.default_rng(123)
        checked = 0
        while checked < 100:
            n = int(rng.integers(2, 5))
            m = int(rng.integers(2, 7))
            c = rng.normal(size=n)
            rows = [
                (rng.normal(size=n).tolist(), float(rng.uniform(0.5, 4.0)))
                for _ in range(m)
            ]
            bounds = [(0.0, float(rng.uniform(1.0, 5.0))) for _ in range(n)]
            lp = LinearProgram(n, c.copy())
            for coeffs, rhs in rows:
                lp.add(dict(enumerate(coeffs)), "<=", rhs)
            for j, (lo, hi) in enumerate(bounds):
                lp.set_bounds(j, lo, hi)
            sol = solve_lp(lp)
            assert sol.status is LpStatus.OPTIMAL  # x=0 feasible, box bounded
            expected = enumerate_vertices(c, rows, bounds)
            assert expected is not None
            assert sol.objective_value == pytest.approx(expected, abs=1e-6)
            checked += 1


class TestDump:
    def test_format_lp_lists_everything(self):
        lp = LinearProgram(2, np.array([0.0, 1.0]), names=["x", "t"])
        lp.set_bounds(0, 0.0, 1.0)
        lp.add({1: 1.0, 0: -5.0}, ">=", 0.0)
        text = format_lp(lp)
        assert "minimize: +1 t" in text
        assert "c0: -5 x +1 t >= 0" in text
        assert "0 <= x <= 1" in text
