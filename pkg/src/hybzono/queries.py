"""Set queries backed by the LP/MILP engine.

Every query reduces to feasibility or optimization over the factor space of
a hybrid zonotope: continuous factors are box variables in [-1, 1], binary
factors are {-1,+1} variables handled by branch-and-bound.
"""

from __future__ import annotations

import numpy as np

from .lp import LinearProgram, SolverError, Status, lp_solve
from .milp import MilpQuery, Mode, milp_solve
from .sets import IntegerFeasibleSet, lift
from .setops import Halfspace, halfspace_intersection

__all__ = [
    "EmptySetError",
    "is_empty",
    "contains_point",
    "support",
    "intersects_halfspace",
    "enumerate_integer_feasible",
    "factor_program",
]


class EmptySetError(SolverError):
    """A query that requires a nonempty set was given an empty one."""


def factor_program(Zh, objective=None, extra_A=None, extra_b=None):
    """LP over the stacked factor vector (continuous first, then binary).

    Returns the program and the index tuple of binary variables.
    """
    Zh = lift(Zh)
    n_vars = Zh.n_g + Zh.n_b
    A = np.hstack([Zh.Ac, Zh.Ab])
    b = Zh.b
    if extra_A is not None:
        A = np.vstack([A, np.atleast_2d(extra_A)])
        b = np.concatenate([b, np.atleast_1d(extra_b)])
    c = np.zeros(n_vars) if objective is None else np.asarray(objective, dtype=float)
    lp = LinearProgram(c, A, b, -np.ones(n_vars), np.ones(n_vars))
    return lp, tuple(range(Zh.n_g, n_vars))


def is_empty(Zh, node_budget=None):
    """True iff no factor assignment satisfies the set's constraints."""
    lp, bins = factor_program(Zh)
    out = milp_solve(MilpQuery(lp, bins), node_budget=node_budget)
    return out.status is Status.INFEASIBLE


def contains_point(Zh, z, node_budget=None):
    """True iff ``z`` is a point of the set (factor residuals within 1e-8)."""
    Zh = lift(Zh)
    z = np.asarray(z, dtype=float).ravel()
    if z.size != Zh.n:
        raise ValueError(f"point must have length {Zh.n}, got {z.size}")
    extra_A = np.hstack([Zh.Gc, Zh.Gb])
    lp, bins = factor_program(Zh, extra_A=extra_A, extra_b=z - Zh.c)
    out = milp_solve(MilpQuery(lp, bins), node_budget=node_budget)
    return out.status is not Status.INFEASIBLE


def support(Zh, l, node_budget=None):
    """Support value ``max{l @ z : z in Zh}`` and the supporting halfspace.

    The returned halfspace contains the set and its boundary hyperplane
    touches it.  Raises :class:`EmptySetError` on empty sets.
    """
    Zh = lift(Zh)
    l = np.asarray(l, dtype=float).ravel()
    if l.size != Zh.n:
        raise ValueError(f"direction must have length {Zh.n}, got {l.size}")
    objective = np.concatenate([Zh.Gc.T @ l, Zh.Gb.T @ l])
    lp, bins = factor_program(Zh, objective=objective)
    out = milp_solve(
        MilpQuery(lp, bins, mode=Mode.MAXIMIZE), node_budget=node_budget
    )
    if out.status is Status.INFEASIBLE:
        raise EmptySetError("support function of an empty set")
    rho = float(out.value + l @ Zh.c)
    return rho, Halfspace(l, rho, allow_degenerate=not np.any(l))


def support_witness(Zh, l, node_budget=None):
    """Like :func:`support` but also returns a maximizing point."""
    Zh = lift(Zh)
    l = np.asarray(l, dtype=float).ravel()
    objective = np.concatenate([Zh.Gc.T @ l, Zh.Gb.T @ l])
    lp, bins = factor_program(Zh, objective=objective)
    out = milp_solve(
        MilpQuery(lp, bins, mode=Mode.MAXIMIZE), node_budget=node_budget
    )
    if out.status is Status.INFEASIBLE:
        raise EmptySetError("support function of an empty set")
    xi = out.witness
    z = Zh.Gc @ xi[: Zh.n_g] + Zh.Gb @ xi[Zh.n_g :] + Zh.c
    return float(out.value + l @ Zh.c), z


def intersects_halfspace(Zh, H, R=None, node_budget=None):
    """True iff the set meets ``{x : l @ (R @ x) <= rho}`` (one MILP)."""
    return not is_empty(halfspace_intersection(Zh, H, R), node_budget=node_budget)


def enumerate_integer_feasible(Zh, node_budget=None):
    """All binary assignments whose leaves are nonempty, sorted and exact."""
    Zh = lift(Zh)
    lp, bins = factor_program(Zh)
    out = milp_solve(
        MilpQuery(lp, bins, enumerate_all=True), node_budget=node_budget
    )
    return IntegerFeasibleSet(out.feasible_assignments, Zh.n_b)
