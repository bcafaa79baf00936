import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import linprog

from hybzono.lp import (
    LinearProgram,
    SolveOutcome,
    Status,
    lp_solve,
    presolve,
)


def box_lp(c, A, b, n=None):
    c = np.asarray(c, dtype=float)
    n = c.size if n is None else n
    return LinearProgram(c, A, b, -np.ones(n), np.ones(n))


class TestBasics:
    def test_single_variable(self):
        out = lp_solve(box_lp([1.0], np.zeros((0, 1)), []))
        assert out.status is Status.OPTIMAL
        assert out.value == pytest.approx(1.0)

    def test_equality_on_box(self):
        out = lp_solve(box_lp([1.0, 1.0], [[1.0, 1.0]], [1.0]))
        assert out.status is Status.OPTIMAL
        assert out.value == pytest.approx(1.0)

    def test_infeasible_rhs_exceeds_row_sum(self):
        out = lp_solve(box_lp([0.0, 0.0, 0.0], [[1.0, 1.0, 1.0]], [5.0]))
        assert out.status is Status.INFEASIBLE

    def test_feasibility_mode(self):
        out = lp_solve(box_lp([0.0, 0.0], [[1.0, -1.0]], [0.5]), feasibility_only=True)
        assert out.status is Status.FEASIBLE
        assert abs(out.witness[0] - out.witness[1] - 0.5) < 1e-8

    def test_general_bounds(self):
        lp = LinearProgram([2.0, -1.0], [[1.0, 1.0]], [3.0], [0.0, 0.0], [4.0, 5.0])
        out = lp_solve(lp)
        assert out.status is Status.OPTIMAL
        assert out.value == pytest.approx(6.0)  # x = (3, 0)

    def test_fixed_variables(self):
        lp = LinearProgram([1.0, 1.0], [[1.0, 1.0]], [1.5], [0.5, -1.0], [0.5, 1.0])
        out = lp_solve(lp)
        assert out.status is Status.OPTIMAL
        assert_allclose(out.witness, [0.5, 1.0])

    def test_rejects_inconsistent_bounds(self):
        with pytest.raises(ValueError):
            LinearProgram([0.0], np.zeros((0, 1)), [], [1.0], [0.0])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            LinearProgram([0.0], np.zeros((0, 1)), [], [-np.inf], [0.0])


class TestPresolve:
    def test_interval_infeasibility(self):
        pre = presolve(
            np.zeros(2), np.array([[1.0, 1.0]]), np.array([5.0]),
            -np.ones(2), np.ones(2),
        )
        assert pre.infeasible

    def test_slack_singleton_elimination(self):
        # Second column appears only in the single row and can always absorb
        # it: the row and the column disappear from the core.
        A = np.array([[1.0, 10.0]])
        pre = presolve(
            np.zeros(2), A, np.array([0.0]), -np.ones(2), np.ones(2)
        )
        assert not pre.infeasible
        assert pre.A.shape == (0, 1)
        x = pre.postsolve(np.array([0.7]))
        assert_allclose(A @ x, [0.0], atol=1e-12)

    def test_protected_columns_survive(self):
        A = np.array([[1.0, 10.0]])
        protect = np.array([False, True])
        pre = presolve(
            np.zeros(2), A, np.array([0.0]), -np.ones(2), np.ones(2), protect=protect
        )
        assert pre.A.shape == (1, 2)

    def test_fixed_variable_substitution(self):
        pre = presolve(
            np.array([1.0, 0.0]),
            np.array([[1.0, 1.0]]),
            np.array([1.0]),
            np.array([-1.0, 0.25]),
            np.array([1.0, 0.25]),
        )
        assert pre.col_origin.tolist() == [0]
        assert_allclose(pre.b * np.max(np.abs(pre.A)), [0.75])


class TestAgainstScipy:
    """Randomized cross-check against an independent solver."""

    @pytest.mark.parametrize("seed", range(12))
    def test_random_boxed_lps(self, seed):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(2, 9))
        m = int(rng.integers(0, n))
        A = rng.uniform(-2, 2, size=(m, n))
        lo = rng.uniform(-2, 0, size=n)
        hi = lo + rng.uniform(0.1, 3, size=n)
        c = rng.uniform(-1, 1, size=n)
        # Bias toward feasibility half of the time.
        if rng.random() < 0.5:
            x0 = rng.uniform(lo, hi)
            b = A @ x0
        else:
            b = rng.uniform(-2, 2, size=m)
        lp = LinearProgram(c, A, b, lo, hi)
        ours = lp_solve(lp)
        ref = linprog(
            -c, A_eq=A if m else None, b_eq=b if m else None,
            bounds=list(zip(lo, hi)), method="highs",
        )
        if ref.status == 2:
            assert ours.status is Status.INFEASIBLE
        else:
            assert ref.status == 0
            assert ours.status is Status.OPTIMAL
            assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
            assert np.all(ours.witness >= lo - 1e-7)
            assert np.all(ours.witness <= hi + 1e-7)
            if m:
                assert_allclose(A @ ours.witness, b, atol=1e-7)

    @pytest.mark.parametrize("seed", range(6))
    def test_degenerate_lps(self, seed):
        # Duplicated rows and zero objective entries stress degeneracy.
        rng = np.random.default_rng(2000 + seed)
        n = int(rng.integers(3, 7))
        row = rng.uniform(-1, 1, size=n)
        A = np.vstack([row, row, rng.uniform(-1, 1, size=n)])
        x0 = rng.uniform(-0.5, 0.5, size=n)
        b = A @ x0
        c = np.zeros(n)
        c[0] = 1.0
        lp = LinearProgram(c, A, b, -np.ones(n), np.ones(n))
        ours = lp_solve(lp)
        ref = linprog(-c, A_eq=A, b_eq=b, bounds=[(-1, 1)] * n, method="highs")
        assert ours.status is Status.OPTIMAL
        assert ours.value == pytest.approx(-ref.fun, abs=1e-7)
