"""Dense linear programming: presolve plus a bounded-variable two-phase simplex.

Problems have the form

    maximize    c @ x
    subject to  A @ x = b,   lo <= x <= hi   (all bounds finite).

The solver is a primal simplex on bounded variables.  Phase 1 minimizes the
total bound violation of basic variables (artificial columns fixed at zero
absorb rows with no usable structural column), phase 2 optimizes the real
objective.  Pricing is Dantzig's rule with a switch to Bland's rule after a
pivot-count threshold to break cycling.  A presolve pass removes fixed
variables, rows that interval arithmetic proves redundant or infeasible,
and implied-free column singletons (the slack columns produced by halfspace
intersections); eliminated variables are reconstructed in postsolve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Status",
    "LinearProgram",
    "SolveOutcome",
    "SolverError",
    "NumericalError",
    "NodeBudgetError",
    "lp_solve",
]

FEAS_TOL = 1e-8  # equality/bound residual accepted on reported witnesses
PH1_TOL = 1e-9  # phase-1 infeasibility below which the basis counts as feasible
PRICE_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 64


class Status(enum.Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class SolverError(Exception):
    """Base class for solver failures."""


class NumericalError(SolverError):
    """The simplex could not produce a trustworthy answer."""


class NodeBudgetError(SolverError):
    """Branch-and-bound exhausted its node budget."""

    def __init__(self, nodes_explored, budget):
        super().__init__(
            f"node budget exhausted: explored {nodes_explored}, budget {budget}"
        )
        self.nodes_explored = nodes_explored
        self.budget = budget


@dataclass
class LinearProgram:
    """Equality-constrained LP over box-bounded variables (maximization)."""

    objective: np.ndarray
    eq_A: np.ndarray
    eq_b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float).ravel()
        self.eq_A = np.atleast_2d(np.asarray(self.eq_A, dtype=float))
        self.eq_b = np.asarray(self.eq_b, dtype=float).ravel()
        self.lo = np.asarray(self.lo, dtype=float).ravel()
        self.hi = np.asarray(self.hi, dtype=float).ravel()
        n = self.objective.size
        if self.eq_A.size == 0:
            self.eq_A = self.eq_A.reshape(self.eq_b.size, n)
        if self.eq_A.shape != (self.eq_b.size, n):
            raise ValueError(
                f"eq_A must be {self.eq_b.size}x{n}, got {self.eq_A.shape}"
            )
        if self.lo.size != n or self.hi.size != n:
            raise ValueError("bounds must match the number of variables")
        if not (
            np.all(np.isfinite(self.lo))
            and np.all(np.isfinite(self.hi))
            and np.all(np.isfinite(self.eq_A))
            and np.all(np.isfinite(self.eq_b))
            and np.all(np.isfinite(self.objective))
        ):
            raise ValueError("LP data must be finite")
        if np.any(self.lo > self.hi):
            raise ValueError("lower bounds exceed upper bounds")

    @property
    def n_vars(self):
        return self.objective.size

    @property
    def n_rows(self):
        return self.eq_b.size


@dataclass(frozen=True)
class SolveOutcome:
    """Result of an LP or MILP solve."""

    status: Status
    witness: np.ndarray | None = None
    value: float | None = None
    nodes_explored: int = 0
    feasible_assignments: np.ndarray | None = None


# ---------------------------------------------------------------------------
# Presolve


class Presolved:
    """Reduced problem plus the bookkeeping needed to undo the reduction."""

    def __init__(self, n_orig):
        self.n_orig = n_orig
        self.infeasible = False
        self.A = None
        self.b = None
        self.c = None
        self.lo = None
        self.hi = None
        self.col_origin = None  # core column -> original column
        self.fixed_values = None  # (n_orig,) values for eliminated fixed columns
        self.fixed_mask = None
        self.actions = []  # reversed replay for eliminated column singletons
        self.obj_const = 0.0

    def core_index(self, orig_col):
        hits = np.nonzero(self.col_origin == orig_col)[0]
        return int(hits[0]) if hits.size else None

    def postsolve(self, x_core):
        """Reconstruct a full-length witness from a core solution."""
        x = np.array(self.fixed_values, dtype=float)
        x[self.col_origin] = x_core
        for col, a, cols, coeffs, rhs in reversed(self.actions):
            x[col] = (rhs - coeffs @ x[cols]) / a
        return x


def presolve(c, A, b, lo, hi, protect=None, max_passes=25):
    """Reduce the LP (exactly) before handing it to the simplex.

    ``protect`` marks columns that must survive untouched (the binary
    variables of a MILP); their bounds are never tightened and they are
    never eliminated, so branch-and-bound can keep adjusting them.
    """
    m, n = A.shape
    pre = Presolved(n)
    Aw = np.array(A, dtype=float)
    bw = np.array(b, dtype=float)
    low = np.array(lo, dtype=float)
    up = np.array(hi, dtype=float)
    cw = np.array(c, dtype=float)
    if protect is None:
        protect = np.zeros(n, dtype=bool)
    row_alive = np.ones(m, dtype=bool)
    col_alive = np.ones(n, dtype=bool)
    fixed_values = np.zeros(n)

    def drop_col(j, value):
        fixed_values[j] = value
        pre.obj_const += cw[j] * value
        bw[row_alive] -= Aw[row_alive, j] * value
        Aw[:, j] = 0.0
        col_alive[j] = False

    for _ in range(max_passes):
        changed = False

        # Fixed variables.
        fixable = col_alive & ~protect & (up - low <= 0.0)
        for j in np.nonzero(fixable)[0]:
            drop_col(j, low[j])
            changed = True

        if not np.any(row_alive):
            break

        live_rows = np.nonzero(row_alive)[0]
        Al = Aw[live_rows]
        row_scale = np.sum(np.abs(Al), axis=1)

        # Empty rows.
        empty = row_scale == 0.0
        if np.any(empty):
            bad = np.abs(bw[live_rows[empty]]) > FEAS_TOL
            if np.any(bad):
                pre.infeasible = True
                return pre
            row_alive[live_rows[empty]] = False
            changed = True
            live_rows = np.nonzero(row_alive)[0]
            Al = Aw[live_rows]

        if live_rows.size:
            # Interval feasibility of each row.
            Apos = np.clip(Al, 0.0, None)
            Aneg = Al - Apos
            rmin = Apos @ low + Aneg @ up
            rmax = Apos @ up + Aneg @ low
            tol = FEAS_TOL * (1.0 + np.abs(bw[live_rows]) + np.sum(np.abs(Al), axis=1))
            if np.any(bw[live_rows] < rmin - tol) or np.any(bw[live_rows] > rmax + tol):
                pre.infeasible = True
                return pre

            # Implied-free column singletons with zero objective: the row can
            # always be satisfied by that column alone, so drop both.
            col_counts = np.count_nonzero(Aw[live_rows][:, col_alive], axis=0)
            counts = np.zeros(n, dtype=int)
            counts[np.nonzero(col_alive)[0]] = col_counts
            candidates = np.nonzero(
                col_alive & ~protect & (counts == 1) & (cw == 0.0)
            )[0]
            used_rows = set()
            for j in candidates:
                rows_j = live_rows[np.nonzero(Aw[live_rows, j])[0]]
                if rows_j.size != 1:
                    continue
                i = int(rows_j[0])
                if i in used_rows:
                    continue
                a = Aw[i, j]
                if abs(a) < PIVOT_TOL:
                    continue
                # Row range excluding column j.
                save = Aw[i, j]
                Aw[i, j] = 0.0
                pos = np.clip(Aw[i], 0.0, None)
                neg = Aw[i] - pos
                rest_min = pos @ low + neg @ up
                rest_max = pos @ up + neg @ low
                Aw[i, j] = save
                v1 = (bw[i] - rest_max) / a
                v2 = (bw[i] - rest_min) / a
                imp_lo, imp_hi = min(v1, v2), max(v1, v2)
                margin = 1e-10 * (1.0 + abs(low[j]) + abs(up[j]))
                if imp_lo >= low[j] + margin and imp_hi <= up[j] - margin:
                    cols = np.nonzero(Aw[i])[0]
                    cols = cols[cols != j]
                    pre.actions.append((j, a, cols.copy(), Aw[i, cols].copy(), bw[i]))
                    row_alive[i] = False
                    Aw[:, j] = 0.0
                    col_alive[j] = False
                    used_rows.add(i)
                    changed = True

        if not changed:
            break

    core_cols = np.nonzero(col_alive)[0]
    core_rows = np.nonzero(row_alive)[0]
    pre.A = Aw[np.ix_(core_rows, core_cols)].copy()
    pre.b = bw[core_rows].copy()
    pre.c = cw[core_cols].copy()
    pre.lo = low[core_cols].copy()
    pre.hi = up[core_cols].copy()
    pre.col_origin = core_cols
    pre.fixed_values = fixed_values
    pre.fixed_mask = ~col_alive

    # Row equilibration (exact: scales equalities only).
    if pre.A.size:
        scale = np.max(np.abs(pre.A), axis=1)
        scale[scale == 0.0] = 1.0
        pre.A /= scale[:, None]
        pre.b /= scale
    return pre


# ---------------------------------------------------------------------------
# Simplex core


class SimplexCore:
    """Bounded-variable primal simplex over a fixed constraint matrix.

    The matrix is extended with one artificial column per row (bounds fixed
    at zero).  ``solve`` may be called repeatedly with different bounds and
    objectives over the same matrix, optionally warm-started from a previous
    basis; branch-and-bound relies on this.
    """

    def __init__(self, A, b):
        self.m, self.n = A.shape
        self.A_ext = np.hstack([A, np.eye(self.m)]) if self.m else A.copy()
        self.b = np.asarray(b, dtype=float)
        self.n_ext = self.n + self.m

    # -- basis helpers ----------------------------------------------------

    def _crash_basis(self, lo, hi):
        """Pick singleton structural columns per row, artificials elsewhere."""
        basis = np.arange(self.n, self.n + self.m)
        if self.n == 0 or self.m == 0:
            return basis
        counts = np.count_nonzero(self.A_ext[:, : self.n], axis=0)
        singles = np.nonzero((counts == 1) & (lo < hi))[0]
        taken = np.zeros(self.m, dtype=bool)
        best = np.zeros(self.m)
        for j in singles:
            i = int(np.nonzero(self.A_ext[:, j])[0][0])
            a = abs(self.A_ext[i, j])
            if a >= PIVOT_TOL and a > best[i]:
                basis[i] = j
                best[i] = a
                taken[i] = True
        return basis

    def _refactor(self, basis):
        B = self.A_ext[:, basis]
        try:
            return np.linalg.inv(B)
        except np.linalg.LinAlgError as err:
            raise NumericalError("singular basis") from err

    def _basic_values(self, basis, Binv, x, basic_mask):
        xn = np.where(basic_mask, 0.0, x)
        r = self.b - self.A_ext @ xn
        return Binv @ r

    # -- main entry --------------------------------------------------------

    def solve(
        self,
        c,
        lo,
        hi,
        feasibility_only=False,
        basis=None,
        at_upper=None,
        max_iter=None,
        bland_after=None,
    ):
        """Run phase 1 (and phase 2 unless ``feasibility_only``).

        Returns ``(status, x_struct, value, basis, at_upper)``.  ``lo``/``hi``
        cover structural columns only; artificials are fixed at zero.
        """
        m, n, n_ext = self.m, self.n, self.n_ext
        lo_e = np.concatenate([lo, np.zeros(m)])
        hi_e = np.concatenate([hi, np.zeros(m)])
        c_e = np.concatenate([np.asarray(c, dtype=float), np.zeros(m)])
        if np.any(lo_e > hi_e):
            return Status.INFEASIBLE, None, None, basis, at_upper
        if max_iter is None:
            max_iter = 50 * (m + n) + 20000
        if bland_after is None:
            bland_after = 10 * (m + n) + 2000

        if m == 0:
            x = np.where(np.abs(lo) <= np.abs(hi), lo, hi)
            if not feasibility_only:
                x = np.where(c_e[:n] > 0, hi, np.where(c_e[:n] < 0, lo, x))
            status = Status.FEASIBLE if feasibility_only else Status.OPTIMAL
            return status, x, float(c_e[:n] @ x), np.array([], dtype=int), np.zeros(n, dtype=bool)

        if basis is None:
            basis = self._crash_basis(lo, hi)
            at_upper = np.abs(hi_e) < np.abs(lo_e)
        else:
            basis = np.array(basis, dtype=int)
            at_upper = np.array(at_upper, dtype=bool)
        try:
            Binv = self._refactor(basis)
        except NumericalError:
            basis = self._crash_basis(lo, hi)
            at_upper = np.abs(hi_e) < np.abs(lo_e)
            Binv = self._refactor(basis)

        basic_mask = np.zeros(n_ext, dtype=bool)
        basic_mask[basis] = True
        x = np.where(at_upper, hi_e, lo_e)
        x[basis] = self._basic_values(basis, Binv, x, basic_mask)

        phase = 1
        iters = 0
        pivots_since_refactor = 0

        while True:
            if iters > max_iter:
                raise NumericalError("simplex iteration limit reached")
            bland = iters >= bland_after
            xb = x[basis]
            lob = lo_e[basis]
            hib = hi_e[basis]

            if phase == 1:
                below = np.maximum(lob - xb, 0.0)
                above = np.maximum(xb - hib, 0.0)
                if below.sum() + above.sum() <= PH1_TOL:
                    if feasibility_only:
                        return (
                            Status.FEASIBLE,
                            x[:n].copy(),
                            float(c_e[:n] @ x[:n]),
                            basis.copy(),
                            at_upper.copy(),
                        )
                    phase = 2
                    continue
                g = np.where(above > 0, 1.0, np.where(below > 0, -1.0, 0.0))
                y = Binv.T @ g
                d = -(y @ self.A_ext)
            else:
                y = Binv.T @ c_e[basis]
                d = c_e - y @ self.A_ext

            free = (~basic_mask) & (lo_e < hi_e)
            if phase == 1:
                elig_lo = free & ~at_upper & (d < -PRICE_TOL)
                elig_hi = free & at_upper & (d > PRICE_TOL)
            else:
                elig_lo = free & ~at_upper & (d > PRICE_TOL)
                elig_hi = free & at_upper & (d < -PRICE_TOL)
            eligible = elig_lo | elig_hi
            if not np.any(eligible):
                if phase == 1:
                    return Status.INFEASIBLE, None, None, basis.copy(), at_upper.copy()
                value = float(c_e[:n] @ x[:n])
                return Status.OPTIMAL, x[:n].copy(), value, basis.copy(), at_upper.copy()

            idxs = np.nonzero(eligible)[0]
            if bland:
                q = int(idxs[0])
            else:
                q = int(idxs[np.argmax(np.abs(d[idxs]))])
            s = -1.0 if at_upper[q] else 1.0
            w = Binv @ self.A_ext[:, q]
            t_cap = hi_e[q] - lo_e[q]

            if phase == 1:
                step = self._ratio_phase1(xb, lob, hib, w, s, d[q], t_cap, bland)
            else:
                step = self._ratio_phase2(xb, lob, hib, w, s, t_cap)
            t_star, leave_pos, leave_bound = step

            # Apply the move.
            x[basis] = xb - s * t_star * w
            x[q] += s * t_star
            if leave_pos is None:
                # Bound flip: the entering variable jumps to its other bound.
                at_upper[q] = not at_upper[q]
                x[q] = hi_e[q] if at_upper[q] else lo_e[q]
            else:
                p = basis[leave_pos]
                x[p] = leave_bound
                at_upper[p] = leave_bound == hi_e[p]
                basic_mask[p] = False
                basic_mask[q] = True
                basis[leave_pos] = q
                piv = w[leave_pos]
                if abs(piv) < PIVOT_TOL:
                    Binv = self._refactor(basis)
                else:
                    row = Binv[leave_pos] / piv
                    col = w.copy()
                    col[leave_pos] = 0.0
                    Binv -= np.outer(col, row)
                    Binv[leave_pos] = row
                pivots_since_refactor += 1
                if pivots_since_refactor >= REFACTOR_EVERY:
                    Binv = self._refactor(basis)
                    x[basis] = self._basic_values(basis, Binv, x, basic_mask)
                    pivots_since_refactor = 0
            iters += 1

    # -- ratio tests -------------------------------------------------------

    @staticmethod
    def _ratio_phase1(xb, lob, hib, w, s, slope0, t_cap, bland):
        """Piecewise-linear phase-1 ratio test.

        Collects the breakpoints at which basic variables cross bounds and
        walks them in order while the infeasibility keeps decreasing.  In
        Bland mode the very first breakpoint blocks.  Returns
        ``(t, leaving_position or None, bound_value)``; ``None`` means the
        entering variable flips to its other bound.
        """
        r = -s * w  # movement rate of each basic variable
        ts, pos, bnds, incs = [], [], [], []
        up = r > PIVOT_TOL
        dn = r < -PIVOT_TOL
        below = xb < lob - 1e-11
        above = xb > hib + 1e-11

        def add(mask, target):
            idx = np.nonzero(mask)[0]
            if idx.size:
                t = (target[idx] - xb[idx]) / r[idx]
                ts.append(np.maximum(t, 0.0))
                pos.append(idx)
                bnds.append(target[idx])
                incs.append(np.abs(r[idx]))

        add(up & below, lob)   # rising through its violated lower bound
        add(up & ~above, hib)  # rising into its upper bound
        add(dn & above, hib)   # falling through its violated upper bound
        add(dn & ~below, lob)  # falling into its lower bound

        if not ts:
            return t_cap, None, None
        t_all = np.concatenate(ts)
        pos_all = np.concatenate(pos)
        bnd_all = np.concatenate(bnds)
        inc_all = np.concatenate(incs)
        order = np.argsort(t_all, kind="stable")
        t_all, pos_all = t_all[order], pos_all[order]
        bnd_all, inc_all = bnd_all[order], inc_all[order]

        if bland:
            k = 0
            if t_all[0] >= t_cap:
                return t_cap, None, None
            return t_all[0], int(pos_all[0]), float(bnd_all[0])

        slope = slope0
        k = None
        for i in range(t_all.size):
            if t_all[i] >= t_cap:
                break
            slope += inc_all[i]
            if slope >= -1e-12:
                k = i
                break
        if k is None:
            return t_cap, None, None
        t_star = t_all[k]
        # Among simultaneous breakpoints pick the largest pivot for stability.
        near = np.nonzero(np.abs(t_all[: k + 1] - t_star) <= 1e-12 * (1.0 + t_star))[0]
        j = near[np.argmax(inc_all[near])]
        return t_all[j], int(pos_all[j]), float(bnd_all[j])

    @staticmethod
    def _ratio_phase2(xb, lob, hib, w, s, t_cap):
        """Classic bounded ratio test over feasible basics."""
        r = -s * w
        t_best = t_cap
        leave = None
        bound = None
        up = np.nonzero(r > PIVOT_TOL)[0]
        dn = np.nonzero(r < -PIVOT_TOL)[0]
        cand_pos = np.concatenate([up, dn])
        if cand_pos.size:
            t_up = (hib[up] - xb[up]) / r[up]
            t_dn = (lob[dn] - xb[dn]) / r[dn]
            t_cand = np.maximum(np.concatenate([t_up, t_dn]), 0.0)
            b_cand = np.concatenate([hib[up], lob[dn]])
            k = np.argmin(t_cand)
            if t_cand[k] < t_best:
                t_best = t_cand[k]
                near = np.nonzero(t_cand <= t_best + 1e-12 * (1.0 + t_best))[0]
                j = near[np.argmax(np.abs(r[cand_pos[near]]))]
                leave = int(cand_pos[j])
                bound = float(b_cand[j])
                t_best = t_cand[j]
        return t_best, leave, bound


# ---------------------------------------------------------------------------
# Public entry point


def _verify(lp, x):
    if x is None:
        return False
    res = 0.0
    if lp.n_rows:
        scale = 1.0 + np.abs(lp.eq_b) + np.sum(np.abs(lp.eq_A), axis=1)
        res = np.max(np.abs(lp.eq_A @ x - lp.eq_b) / scale)
    bnd = max(np.max(lp.lo - x, initial=0.0), np.max(x - lp.hi, initial=0.0))
    return res <= FEAS_TOL and bnd <= 1e-6


def lp_solve(lp, feasibility_only=False):
    """Solve a :class:`LinearProgram`.

    Returns OPTIMAL (FEASIBLE when ``feasibility_only``) with a primal
    witness, or INFEASIBLE when phase 1 terminates with a certificate of
    positive infeasibility.  Numerical breakdown raises
    :class:`NumericalError` rather than returning a wrong answer.
    """
    pre = presolve(lp.objective, lp.eq_A, lp.eq_b, lp.lo, lp.hi)
    if pre.infeasible:
        return SolveOutcome(Status.INFEASIBLE)
    core = SimplexCore(pre.A, pre.b)
    status, x_core, _, _, _ = core.solve(
        pre.c, pre.lo, pre.hi, feasibility_only=feasibility_only
    )
    if status is Status.INFEASIBLE:
        return SolveOutcome(Status.INFEASIBLE)
    x = pre.postsolve(x_core)
    x = np.clip(x, lp.lo, lp.hi)
    if not _verify(lp, x):
        # One clean retry from scratch under Bland's rule.
        status, x_core, _, _, _ = core.solve(
            pre.c, pre.lo, pre.hi, feasibility_only=feasibility_only, bland_after=0
        )
        if status is Status.INFEASIBLE:
            return SolveOutcome(Status.INFEASIBLE)
        x = np.clip(pre.postsolve(x_core), lp.lo, lp.hi)
        if not _verify(lp, x):
            raise NumericalError("witness failed feasibility verification")
    value = float(lp.objective @ x)
    return SolveOutcome(
        Status.FEASIBLE if feasibility_only else Status.OPTIMAL,
        witness=x,
        value=value,
    )
