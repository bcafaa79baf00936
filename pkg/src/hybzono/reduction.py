"""Representation-complexity reduction for hybrid zonotopes.

Three exact techniques: removal of inequality slack rows that can never be
violated, incremental binary-tree growth that reuses the parent set's
integer feasible set, and elimination of linearly dependent or constant
binary factors.  None of them changes the represented point set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lp import LinearProgram, SolverError, Status
from .milp import MilpQuery, milp_solve
from .queries import enumerate_integer_feasible, factor_program
from .sets import HybridZonotope, IntegerFeasibleSet, branch_node

__all__ = [
    "ReductionReport",
    "AmbiguousRankError",
    "remove_redundant_inequalities",
    "grow_tree",
    "reduce_binary_factors",
]


class AmbiguousRankError(SolverError):
    """Rank decision fell inside the numerical ambiguity band."""


@dataclass
class ReductionReport:
    removed_constraint_rows: list = field(default_factory=list)
    removed_generator_columns: list = field(default_factory=list)
    binary_map: tuple | None = None  # (M, m) with Gb_new = Gb @ M, c_new = c + Gb @ m
    dims_before: tuple = ()
    dims_after: tuple = ()

    def to_dict(self):
        return {
            "removed_constraint_rows": [int(i) for i in self.removed_constraint_rows],
            "removed_generator_columns": [int(i) for i in self.removed_generator_columns],
            "binaries_reduced": self.binary_map is not None,
            "dims_before": list(self.dims_before),
            "dims_after": list(self.dims_after),
        }


# ---------------------------------------------------------------------------
# Redundant inequality (slack) removal


def _slack_row_ranges(Zh, tags):
    """Implied interval of each tagged slack from its own row over the box."""
    ranges = []
    for col, row in tags:
        a_s = Zh.Ac[row, col]
        if a_s <= 0.0:
            ranges.append(None)
            continue
        r_c = Zh.Ac[row].copy()
        r_c[col] = 0.0
        rest = np.sum(np.abs(r_c)) + np.sum(np.abs(Zh.Ab[row]))
        ranges.append(((Zh.b[row] - rest) / a_s, (Zh.b[row] + rest) / a_s))
    return ranges


def remove_redundant_inequalities(Zh, node_budget=None, scan_order=None, max_workers=1):
    """Drop slack rows whose inequalities are satisfied everywhere.

    Scanning in ascending creation order, each tagged slack row is tested
    for feasibility of a violation (the slack forced past the extreme where
    the inequality becomes active) against the system with the rows removed
    so far taken out.  Removed rows are neutralized by widening their slack
    bounds to the row-implied interval, which is algebraically equivalent to
    deleting the row and its column, so a single constraint matrix serves
    every test.  Mutually redundant rows therefore cannot erase each other;
    the point set is always preserved.  ``max_workers`` parallelizes the
    violation tests within chunks of not-yet-decided rows.
    """
    report = ReductionReport(dims_before=Zh.dims, dims_after=Zh.dims)
    if not Zh.slack_tags:
        return Zh, report
    tags = list(Zh.slack_tags)
    order = list(range(len(tags))) if scan_order is None else list(scan_order)
    ranges = _slack_row_ranges(Zh, tags)
    lp, bins = factor_program(Zh)
    lo0 = lp.lo.copy()
    hi0 = lp.hi.copy()

    removed_idx = []

    def test(idx, removed):
        col, row = tags[idx]
        if ranges[idx] is None:
            return False  # degenerate slack rows are never removed
        xi_min, _ = ranges[idx]
        if xi_min > -1.0 + 1e-9:
            return True  # the slack can never reach the violating side
        lo = lo0.copy()
        hi = hi0.copy()
        for j in removed:
            c_j = tags[j][0]
            r_lo, r_hi = ranges[j]
            lo[c_j] = min(r_lo, -1.0)
            hi[c_j] = max(r_hi, 1.0)
        lo[col] = min(xi_min, -1.0)
        hi[col] = -1.0
        lp2 = LinearProgram(lp.objective, lp.eq_A, lp.eq_b, lo, hi)
        out = milp_solve(MilpQuery(lp2, bins), node_budget=node_budget)
        return out.status is Status.INFEASIBLE

    if max_workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        # Chunked scan: rows in a chunk are tested against the same removed
        # set; confirmed removals only take effect for later chunks, which
        # keeps results deterministic.  A row removed in the same chunk as a
        # mutual partner is re-verified sequentially.
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            pos = 0
            while pos < len(order):
                chunk = order[pos : pos + max_workers]
                snapshot = list(removed_idx)
                flags = list(pool.map(lambda i: test(i, snapshot), chunk))
                for i, f in zip(chunk, flags):
                    if f and (not removed_idx or removed_idx == snapshot or test(i, removed_idx)):
                        removed_idx.append(i)
                pos += len(chunk)
    else:
        for i in order:
            if test(i, removed_idx):
                removed_idx.append(i)

    if not removed_idx:
        return Zh, report
    redundant = [tags[i] for i in removed_idx]

    dead_cols = sorted(col for col, _ in redundant)
    dead_rows = sorted(row for _, row in redundant)
    keep_cols = np.setdiff1d(np.arange(Zh.n_g), dead_cols)
    keep_rows = np.setdiff1d(np.arange(Zh.n_c), dead_rows)
    col_shift = np.cumsum(np.isin(np.arange(Zh.n_g), dead_cols))
    row_shift = np.cumsum(np.isin(np.arange(Zh.n_c), dead_rows))
    new_tags = [
        (col - int(col_shift[col]), row - int(row_shift[row]))
        for col, row in Zh.slack_tags
        if (col, row) not in set(redundant)
    ]
    out = HybridZonotope(
        Zh.Gc[:, keep_cols],
        Zh.Gb,
        Zh.c,
        Zh.Ac[np.ix_(keep_rows, keep_cols)],
        Zh.Ab[keep_rows],
        Zh.b[keep_rows],
        slack_tags=new_tags,
    )
    report.removed_constraint_rows = dead_rows
    report.removed_generator_columns = dead_cols
    report.dims_after = out.dims
    return out, report


# ---------------------------------------------------------------------------
# Binary tree growth


def grow_tree(Zh2, T1, node_budget=None, max_workers=1):
    """Integer feasible set of ``Zh2`` grown from its ancestor's set ``T1``.

    ``Zh2`` must extend a set whose first ``T1.n_b`` binary factors match
    ``T1`` (set operations append new binary factors last, so reachability
    preserves this chronological layering).  Each entry of ``T1`` spawns a
    branch node over only the new factors, which keeps the per-node search
    small; the union of results equals direct enumeration of ``Zh2``.
    """
    n_b1 = T1.n_b
    if n_b1 > Zh2.n_b:
        raise ValueError(
            f"ancestor tree has {n_b1} factors but the set has only {Zh2.n_b}"
        )

    def branch(xi):
        node = branch_node(Zh2, xi.astype(float), n_b1)
        tails = enumerate_integer_feasible(node, node_budget=node_budget)
        return [np.concatenate([xi, tail]) for tail in tails]

    entries = []
    if max_workers > 1 and len(T1) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            for part in pool.map(branch, list(T1)):
                entries.extend(part)
    else:
        for xi in T1:
            entries.extend(branch(xi))
    return IntegerFeasibleSet(entries, Zh2.n_b)


# ---------------------------------------------------------------------------
# Binary factor reduction


def _pivoted_row_basis(T_mat, rel_tol=1e-9, ambig_tol=1e-9):
    """Indices of linearly independent rows via pivoted orthogonalization."""
    work = T_mat.astype(float).copy()
    norms = np.linalg.norm(work, axis=1)
    threshold = rel_tol * (norms.max() if norms.size else 0.0)
    selected = []
    for _ in range(work.shape[0]):
        norms = np.linalg.norm(work, axis=1)
        band = ambig_tol * np.maximum(threshold, norms)
        if np.any(np.abs(norms - threshold) <= band):
            raise AmbiguousRankError(
                "row norms fall within the ambiguity band of the rank threshold"
            )
        i = int(np.argmax(norms))
        if norms[i] <= threshold:
            break
        selected.append(i)
        q = work[i] / norms[i]
        work -= np.outer(work @ q, q)
        work[i] = 0.0
    return sorted(selected)


def reduce_binary_factors(Zh, T):
    """Remove linearly dependent and constant binary factors.

    Builds the matrix whose columns are the feasible assignments, maps the
    binary generator blocks through the dependency relation, and shifts
    constant factors into the center.  The integer feasible set shrinks to
    the independent rows; its cardinality (the set's leaves) is unchanged.
    """
    if T.n_b != Zh.n_b:
        raise ValueError(f"T has n_b={T.n_b}, set has n_b={Zh.n_b}")
    report = ReductionReport(dims_before=Zh.dims, dims_after=Zh.dims)
    if Zh.n_b == 0 or len(T) == 0:
        return Zh, T, report

    T_mat = T.to_matrix()  # n_b x |T|
    n_b = Zh.n_b
    M_total = np.eye(n_b)
    m_total = np.zeros(n_b)
    Gb = Zh.Gb
    Ab = Zh.Ab
    c = Zh.c
    b = Zh.b
    changed = False

    while True:
        phi = _pivoted_row_basis(T_mat)
        n_phi = len(phi)
        if n_phi < T_mat.shape[0]:
            TPhi = T_mat[phi]
            M1 = T_mat @ np.linalg.pinv(TPhi)
            if np.max(np.abs(M1 @ TPhi - T_mat)) > 1e-10:
                raise AmbiguousRankError("dependency map residual exceeds 1e-10")
            Gb = Gb @ M1
            Ab = Ab @ M1
            M_total = M_total @ M1
            T_mat = TPhi
            changed = True
            continue

        # One constant row per pass, shifted into the center.
        const_rows = [
            i for i in range(T_mat.shape[0]) if np.all(T_mat[i] == T_mat[i, 0])
        ]
        if not const_rows or T_mat.shape[0] == 0:
            break
        r = const_rows[0]
        value = T_mat[r, 0]
        keep = [i for i in range(T_mat.shape[0]) if i != r]
        m2 = np.zeros(T_mat.shape[0])
        m2[r] = value
        c = c + Gb @ m2
        b = b - Ab @ m2
        m_total = m_total + M_total @ m2
        Gb = Gb[:, keep]
        Ab = Ab[:, keep]
        M_total = M_total[:, keep]
        T_mat = T_mat[keep]
        changed = True

    if not changed:
        return Zh, T, report
    out = HybridZonotope(Zh.Gc, Gb, c, Zh.Ac, Ab, b, slack_tags=Zh.slack_tags)
    T_new = IntegerFeasibleSet(T_mat.T.astype(np.int8), out.n_b)
    if len(T_new) != len(T):
        raise AmbiguousRankError("binary reduction changed the number of leaves")
    report.binary_map = (M_total, m_total)
    report.dims_after = out.dims
    return out, T_new, report
