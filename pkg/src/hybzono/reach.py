"""Exact forward reachability of MLD systems as hybrid zonotopes.

One step lifts the current set through the stacked dynamics/inequality
matrices, sums the input and auxiliary contributions, enforces each
inequality row as a halfspace intersection (one slack generator and one
constraint row each), and projects back to the state coordinates.  The
representation therefore grows by exactly

    (n_gu + n_rc + n_e,  n_bu + n_rl,  n_cu + n_e)

per step; nonconvexity lives entirely in the binary factors.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .queries import enumerate_integer_feasible, support
from .reduction import grow_tree, reduce_binary_factors, remove_redundant_inequalities
from .sets import HybridZonotope, lift
from .setops import Halfspace, halfspace_intersection, linear_map, minkowski_sum

__all__ = [
    "ReachOptions",
    "ReachResult",
    "reach_step",
    "reach",
    "predicted_dims",
    "domain_check",
]


@dataclass
class ReachOptions:
    steps: int
    reduce_inequalities: bool = False
    reduce_binaries: bool = False
    track_tree: bool = True
    node_budget: int | None = None
    domain_check: bool = False
    max_workers: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be nonnegative")
        if self.reduce_binaries and not self.track_tree:
            raise ValueError("binary reduction requires tree tracking")


@dataclass
class ReachResult:
    sets: list = field(default_factory=list)
    dims: list = field(default_factory=list)
    trees: list = field(default_factory=list)  # IntegerFeasibleSet or None per step
    removed_rows: list = field(default_factory=list)  # count per step
    timings: list = field(default_factory=list)  # seconds per step
    reduction_reports: list = field(default_factory=list)
    domain_ok: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def steps(self):
        return len(self.sets) - 1

    @property
    def removed_total(self):
        return int(sum(self.removed_rows))

    def tree_sizes(self):
        return [len(t) if t is not None else None for t in self.trees]

    def to_dict(self):
        """Deterministic JSON payload (timings are reported separately)."""
        return {
            "steps": self.steps,
            "dims": [list(d) for d in self.dims],
            "tree_sizes": self.tree_sizes(),
            "removed_rows": [int(r) for r in self.removed_rows],
            "removed_total": self.removed_total,
            "domain_ok": self.domain_ok,
            "notes": list(self.notes),
            "reductions": [r.to_dict() for r in self.reduction_reports],
        }


def reach_step(Rk, m, U, W):
    """One exact forward step of the MLD dynamics.

    Lift through ``[A; Ex]``, add the input/auxiliary/affine contributions,
    intersect with each inequality row's halfspace one row at a time, and
    project back onto the first ``n`` coordinates.
    """
    Rk, U, W = lift(Rk), lift(U), lift(W)
    d = m.dims
    n, n_e = d.n, d.n_e
    if Rk.n != n:
        raise ValueError(f"set dimension {Rk.n} does not match the model ({n})")
    if U.n != d.n_u or W.n != d.n_r:
        raise ValueError("input/auxiliary set dimensions do not match the model")
    gamma = np.vstack([m.A, m.Ex])
    lifted = linear_map(gamma, Rk)
    lifted = minkowski_sum(lifted, linear_map(np.vstack([m.Bu, m.Eu]), U))
    lifted = minkowski_sum(lifted, linear_map(np.vstack([m.Bw, m.Ew]), W))
    aff = HybridZonotope(
        np.zeros((n + n_e, 0)),
        np.zeros((n + n_e, 0)),
        np.concatenate([m.Baff, np.zeros(n_e)]),
    )
    lifted = minkowski_sum(lifted, aff)
    selector = np.hstack([np.zeros((n_e, n)), np.eye(n_e)])
    for i in range(n_e):
        e_i = np.zeros(n_e)
        e_i[i] = 1.0
        lifted = halfspace_intersection(
            lifted, Halfspace(e_i, m.Eaff[i]), R=selector
        )
    return linear_map(np.hstack([np.eye(n), np.zeros((n, n_e))]), lifted)


def predicted_dims(k, m, U, R0_dims):
    """Closed-form representation dimensions after ``k`` steps."""
    U = lift(U)
    d = m.dims
    per = (U.n_g + d.n_rc + d.n_e, U.n_b + d.n_rl, U.n_c + d.n_e)
    return tuple(per[i] * k + R0_dims[i] for i in range(3))


def domain_check(Rk, lo, hi, tol=1e-8, node_budget=None):
    """True iff the set lies inside the axis-aligned box ``[lo, hi]``."""
    Rk = lift(Rk)
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    if lo.size != Rk.n or hi.size != Rk.n:
        raise ValueError("box bounds must match the set dimension")
    for i in range(Rk.n):
        e = np.zeros(Rk.n)
        e[i] = 1.0
        if support(Rk, e, node_budget=node_budget)[0] > hi[i] + tol:
            return False
        if -support(Rk, -e, node_budget=node_budget)[0] < lo[i] - tol:
            return False
    return True


def box_hull(Zh):
    """Interval hull of an unconstrained hybrid zonotope (for domain boxes)."""
    Zh = lift(Zh)
    radius = np.sum(np.abs(Zh.Gc), axis=1) + np.sum(np.abs(Zh.Gb), axis=1)
    return Zh.c - radius, Zh.c + radius


def reach(R0, m, domains, opts):
    """Iterated reachability with optional per-step reduction and tree growth."""
    R = lift(R0)
    result = ReachResult()
    result.sets.append(R)
    result.dims.append(R.dims)
    result.removed_rows.append(0)
    result.timings.append(0.0)
    T = None
    if opts.track_tree:
        T = enumerate_integer_feasible(R, node_budget=opts.node_budget)
    result.trees.append(T)
    X_lo, X_hi = box_hull(domains.X) if opts.domain_check else (None, None)
    if opts.domain_check:
        result.domain_ok = True

    for k in range(1, opts.steps + 1):
        t0 = time.perf_counter()
        if opts.domain_check and not domain_check(
            R, X_lo, X_hi, node_budget=opts.node_budget
        ):
            result.domain_ok = False
            result.notes.append(
                f"step {k}: current set leaves the model domain; "
                "subsequent sets may be inner approximations"
            )
        R = reach_step(R, m, domains.U, domains.W)
        if opts.track_tree:
            T = grow_tree(
                R, T, node_budget=opts.node_budget, max_workers=opts.max_workers
            )
        removed = 0
        # Binary reduction first: it shrinks the factor space the redundancy
        # tests have to search, which both speeds them up and exposes rows
        # whose violations were only reachable through infeasible binary
        # combinations.
        if opts.reduce_binaries:
            R, T, rep_b = reduce_binary_factors(R, T)
            result.reduction_reports.append(rep_b)
        if opts.reduce_inequalities:
            R, rep = remove_redundant_inequalities(
                R, node_budget=opts.node_budget, max_workers=opts.max_workers
            )
            removed = len(rep.removed_constraint_rows)
            result.reduction_reports.append(rep)
        result.sets.append(R)
        result.dims.append(R.dims)
        result.trees.append(T)
        result.removed_rows.append(removed)
        result.timings.append(time.perf_counter() - t0)
    return result
