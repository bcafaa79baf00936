"""Closed-form set operations on hybrid zonotopes.

Linear maps, Minkowski sums, generalized intersections and halfspace
intersections all have exact algebraic identities in HCG-rep.  Every
operation below returns a new immutable set and keeps the representation
growth bookkeeping exact: a linear map leaves (n_g, n_b, n_c) unchanged,
a Minkowski sum adds them pairwise, a generalized intersection adds the
second operand's counts plus one constraint row per mapped dimension, and
a halfspace intersection adds exactly one continuous generator and one
constraint row.
"""

from __future__ import annotations

import numpy as np

from .sets import HybridZonotope, lift

__all__ = [
    "Halfspace",
    "linear_map",
    "minkowski_sum",
    "generalized_intersection",
    "halfspace_intersection",
]


class Halfspace:
    """Closed halfspace ``{x : l @ x <= rho}``."""

    def __init__(self, l, rho, allow_degenerate=False):
        self.l = np.array(l, dtype=float).ravel()
        self.rho = float(rho)
        if not np.all(np.isfinite(self.l)) or not np.isfinite(self.rho):
            raise ValueError("halfspace data must be finite")
        if not allow_degenerate and not np.any(self.l):
            raise ValueError("halfspace normal is all-zero")
        self.l.setflags(write=False)

    def __repr__(self):
        return f"Halfspace(l={self.l.tolist()}, rho={self.rho})"


def linear_map(R, Zh):
    """Image ``{R @ z : z in Zh}``; constraints are unchanged."""
    Zh = lift(Zh)
    R = np.atleast_2d(np.array(R, dtype=float))
    if R.shape[1] != Zh.n:
        raise ValueError(f"R must have {Zh.n} columns, got {R.shape[1]}")
    return HybridZonotope(
        R @ Zh.Gc, R @ Zh.Gb, R @ Zh.c, Zh.Ac, Zh.Ab, Zh.b,
        slack_tags=Zh.slack_tags,
    )


def minkowski_sum(Zh, Wh):
    """Minkowski sum ``{z + w : z in Zh, w in Wh}``."""
    Zh, Wh = lift(Zh), lift(Wh)
    if Zh.n != Wh.n:
        raise ValueError(f"ambient dimensions differ: {Zh.n} vs {Wh.n}")
    Gc = np.hstack([Zh.Gc, Wh.Gc])
    Gb = np.hstack([Zh.Gb, Wh.Gb])
    Ac = np.block(
        [
            [Zh.Ac, np.zeros((Zh.n_c, Wh.n_g))],
            [np.zeros((Wh.n_c, Zh.n_g)), Wh.Ac],
        ]
    )
    Ab = np.block(
        [
            [Zh.Ab, np.zeros((Zh.n_c, Wh.n_b))],
            [np.zeros((Wh.n_c, Zh.n_b)), Wh.Ab],
        ]
    )
    tags = list(Zh.slack_tags) + [
        (col + Zh.n_g, row + Zh.n_c) for col, row in Wh.slack_tags
    ]
    return HybridZonotope(
        Gc, Gb, Zh.c + Wh.c, Ac, Ab,
        np.concatenate([Zh.b, Wh.b]), slack_tags=tags,
    )


def generalized_intersection(Zh, Yh, R=None):
    """Generalized intersection ``{z in Zh : R @ z in Yh}``."""
    Zh, Yh = lift(Zh), lift(Yh)
    if R is None:
        R = np.eye(Zh.n)
    R = np.atleast_2d(np.array(R, dtype=float))
    if R.shape != (Yh.n, Zh.n):
        raise ValueError(f"R must be {Yh.n}x{Zh.n}, got {R.shape}")
    m = Yh.n
    Gc = np.hstack([Zh.Gc, np.zeros((Zh.n, Yh.n_g))])
    Gb = np.hstack([Zh.Gb, np.zeros((Zh.n, Yh.n_b))])
    Ac = np.block(
        [
            [Zh.Ac, np.zeros((Zh.n_c, Yh.n_g))],
            [np.zeros((Yh.n_c, Zh.n_g)), Yh.Ac],
            [R @ Zh.Gc, -Yh.Gc],
        ]
    )
    Ab = np.block(
        [
            [Zh.Ab, np.zeros((Zh.n_c, Yh.n_b))],
            [np.zeros((Yh.n_c, Zh.n_b)), Yh.Ab],
            [R @ Zh.Gb, -Yh.Gb],
        ]
    )
    b = np.concatenate([Zh.b, Yh.b, Yh.c - R @ Zh.c])
    tags = list(Zh.slack_tags) + [
        (col + Zh.n_g, row + Zh.n_c) for col, row in Yh.slack_tags
    ]
    return HybridZonotope(Gc, Gb, Zh.c, Ac, Ab, b, slack_tags=tags)


def halfspace_intersection(Zh, H, R=None):
    """Intersection ``{z in Zh : l @ (R @ z) <= rho}``.

    Adds one slack generator column (recorded in ``slack_tags``) and one
    constraint row.  When the box relaxation of ``Zh`` lies strictly on the
    infeasible side of the halfspace the exact result is empty; in that
    case an inconsistent constraint row with the same growth bookkeeping
    is emitted instead of the generic identity, which would otherwise
    misrepresent the (empty) point set.
    """
    Zh = lift(Zh)
    if R is None:
        R = np.eye(Zh.n)
    R = np.atleast_2d(np.array(R, dtype=float))
    if R.shape[1] != Zh.n:
        raise ValueError(f"R must have {Zh.n} columns, got {R.shape[1]}")
    l = H.l
    if l.size != R.shape[0]:
        raise ValueError(f"halfspace normal must have length {R.shape[0]}")
    lR = l @ R
    row_c = lR @ Zh.Gc
    row_b = lR @ Zh.Gb
    offset = float(lR @ Zh.c)
    d_m = H.rho - offset + np.sum(np.abs(row_c)) + np.sum(np.abs(row_b))
    if not np.isfinite(d_m):
        raise ValueError("halfspace intersection produced non-finite d_m")

    new_col = np.zeros((Zh.n, 1))
    Gc = np.hstack([Zh.Gc, new_col])
    if d_m < 0.0:
        # Relaxation entirely violates the halfspace: emit an empty set
        # with the uniform (+1 generator, +1 constraint) bookkeeping.
        new_row_c = np.zeros(Zh.n_g + 1)
        new_row_b = np.zeros(Zh.n_b)
        rhs = 1.0
    else:
        new_row_c = np.concatenate([row_c, [d_m / 2.0]])
        new_row_b = row_b
        rhs = H.rho - offset - d_m / 2.0
    Ac = np.vstack([np.hstack([Zh.Ac, np.zeros((Zh.n_c, 1))]), new_row_c])
    Ab = np.vstack([Zh.Ab, new_row_b]) if Zh.n_b else np.zeros((Zh.n_c + 1, 0))
    b = np.concatenate([Zh.b, [rhs]])
    tags = list(Zh.slack_tags) + [(Zh.n_g, Zh.n_c)]
    return HybridZonotope(Gc, Zh.Gb, Zh.c, Ac, Ab, b, slack_tags=tags)
