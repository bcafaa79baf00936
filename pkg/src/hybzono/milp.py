"""Branch-and-bound over binary variables restricted to {-1,+1}.

Integrality is decided purely by branching on the binary variables (no
rounding heuristics), with LP relaxations providing feasibility pruning and
optimality bounds.  Branching is deterministic: the lowest-index unfixed
binary is fixed first, the -1 branch is explored before the +1 branch, so
enumeration yields assignments in lexicographic order and repeated runs
produce identical results.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np

from .lp import (
    FEAS_TOL,
    NodeBudgetError,
    SimplexCore,
    SolveOutcome,
    Status,
    presolve,
)

__all__ = ["Mode", "MilpQuery", "milp_solve", "DEFAULT_NODE_BUDGET", "NODE_BUDGET_ENV"]

DEFAULT_NODE_BUDGET = 10_000_000
NODE_BUDGET_ENV = "HYBZONO_NODE_BUDGET"


class Mode(enum.Enum):
    FEASIBILITY = "feasibility"
    MAXIMIZE = "maximize"


@dataclass
class MilpQuery:
    """LP base problem plus the index set of {-1,+1}-restricted variables."""

    base: "LinearProgram"
    binary_vars: tuple
    mode: Mode = Mode.FEASIBILITY
    enumerate_all: bool = False

    def __post_init__(self):
        self.binary_vars = tuple(int(j) for j in self.binary_vars)
        n = self.base.n_vars
        for j in self.binary_vars:
            if not 0 <= j < n:
                raise ValueError(f"binary index {j} out of range")
        if len(set(self.binary_vars)) != len(self.binary_vars):
            raise ValueError("duplicate binary indices")


def resolve_node_budget(explicit=None):
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(NODE_BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_NODE_BUDGET


def milp_solve(q, node_budget=None):
    """Solve or enumerate a :class:`MilpQuery`.

    FEASIBILITY mode stops at the first integer-feasible leaf; MAXIMIZE
    proves a global optimum via relaxation bounds; with ``enumerate_all``
    every integer-feasible assignment is collected (in lexicographic order)
    into ``SolveOutcome.feasible_assignments``.
    """
    budget = resolve_node_budget(node_budget)
    lp = q.base
    bvars = np.array(sorted(q.binary_vars), dtype=int)
    n_bin = bvars.size
    protect = np.zeros(lp.n_vars, dtype=bool)
    protect[bvars] = True

    pre = presolve(lp.objective, lp.eq_A, lp.eq_b, lp.lo, lp.hi, protect=protect)
    if pre.infeasible:
        empty = (
            np.zeros((0, n_bin), dtype=np.int8) if q.enumerate_all else None
        )
        return SolveOutcome(Status.INFEASIBLE, nodes_explored=0, feasible_assignments=empty)

    core = SimplexCore(pre.A, pre.b)
    bin_core = np.array([pre.core_index(j) for j in bvars], dtype=int)
    lo0, hi0 = pre.lo, pre.hi
    maximize = q.mode is Mode.MAXIMIZE and not q.enumerate_all
    c_core = pre.c if maximize else np.zeros_like(pre.c)
    if pre.A.size:
        Apos = np.clip(pre.A, 0.0, None)
        Aneg = pre.A - Apos
        row_tol = FEAS_TOL * (1.0 + np.abs(pre.b) + np.sum(np.abs(pre.A), axis=1))
    else:
        Apos = Aneg = row_tol = None

    nodes = 0
    best_val = -np.inf
    best_x = None
    first_x = None
    assignments = []

    # Stack entries: (depth, values, warm basis, warm at_upper).
    stack = [(0, (), None, None)]
    while stack:
        depth, vals, basis, atup = stack.pop()
        nodes += 1
        if nodes > budget:
            raise NodeBudgetError(nodes, budget)

        lo = lo0.copy()
        hi = hi0.copy()
        if depth:
            fixed = np.array(vals, dtype=float)
            lo[bin_core[:depth]] = fixed
            hi[bin_core[:depth]] = fixed

        if Apos is not None:
            rmin = Apos @ lo + Aneg @ hi
            rmax = Apos @ hi + Aneg @ lo
            if np.any(pre.b < rmin - row_tol) or np.any(pre.b > rmax + row_tol):
                continue

        status, x_core, val, basis2, atup2 = core.solve(
            c_core, lo, hi,
            feasibility_only=not maximize,
            basis=basis, at_upper=atup,
        )
        if status is Status.INFEASIBLE:
            continue

        if depth == n_bin:
            if maximize:
                total = val + pre.obj_const
                if total > best_val:
                    best_val = total
                    best_x = pre.postsolve(x_core)
            elif q.enumerate_all:
                assignments.append(vals)
                if first_x is None:
                    first_x = pre.postsolve(x_core)
            else:
                w = np.clip(pre.postsolve(x_core), lp.lo, lp.hi)
                return SolveOutcome(Status.FEASIBLE, witness=w, nodes_explored=nodes)
            continue

        if maximize and val + pre.obj_const <= best_val + 1e-12:
            continue

        # Pop order explores the -1 branch first.
        stack.append((depth + 1, vals + (1,), basis2, atup2))
        stack.append((depth + 1, vals + (-1,), basis2, atup2))

    if q.enumerate_all:
        arr = np.array(assignments, dtype=np.int8).reshape(len(assignments), n_bin)
        status = Status.FEASIBLE if assignments else Status.INFEASIBLE
        w = np.clip(first_x, lp.lo, lp.hi) if first_x is not None else None
        return SolveOutcome(
            status, witness=w, nodes_explored=nodes, feasible_assignments=arr
        )
    if maximize:
        if best_x is None:
            return SolveOutcome(Status.INFEASIBLE, nodes_explored=nodes)
        w = np.clip(best_x, lp.lo, lp.hi)
        return SolveOutcome(
            Status.OPTIMAL, witness=w, value=best_val, nodes_explored=nodes
        )
    return SolveOutcome(Status.INFEASIBLE, nodes_explored=nodes)
