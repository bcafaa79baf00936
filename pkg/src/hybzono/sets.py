"""Zonotopic set representations with continuous and binary factors.

Conventions used throughout the package:

* matrices are dense 2-D float arrays, vectors 1-D float arrays;
* a hybrid zonotope is the point set
  ``{Gc @ xc + Gb @ xb + c : |xc|_inf <= 1, xb in {-1,+1}^n_b, Ac @ xc + Ab @ xb = b}``;
* all set values are immutable after construction (arrays are frozen), so
  they can be shared freely between threads and operations.
"""

from __future__ import annotations

import json

import numpy as np

__all__ = [
    "Zonotope",
    "ConstrainedZonotope",
    "HybridZonotope",
    "IntegerFeasibleSet",
    "make_box",
    "lift",
    "leaf",
    "branch_node",
    "decompose",
    "cartesian_product",
    "set_to_json",
    "set_from_json",
    "save_set",
    "load_set",
]


def _vector(v, name):
    v = np.array(v, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite entries")
    return v


def _matrix(M, rows, cols, name):
    """Coerce ``M`` to a (rows, cols) float matrix.

    ``None`` and empty sequences stand for an empty block; whichever of
    ``rows``/``cols`` is None is inferred from the data.
    """
    if M is None:
        M = np.zeros((rows if rows is not None else 0, cols if cols is not None else 0))
    M = np.array(M, dtype=float)
    if M.size == 0:
        M = M.reshape((rows if rows is not None else 0, cols if cols is not None else 0))
    if M.ndim == 1:
        M = M.reshape(1, -1)
    if M.ndim != 2:
        raise ValueError(f"{name} must be a matrix, got ndim={M.ndim}")
    if rows is not None and M.shape[0] != rows:
        raise ValueError(f"{name} must have {rows} rows, got {M.shape[0]}")
    if cols is not None and M.shape[1] != cols:
        raise ValueError(f"{name} must have {cols} columns, got {M.shape[1]}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


def _freeze(*arrays):
    for a in arrays:
        a.setflags(write=False)


class Zonotope:
    """Affine image of the unit hypercube: ``{G @ xi + c : |xi|_inf <= 1}``."""

    def __init__(self, G, c):
        self.c = _vector(c, "c")
        self.G = _matrix(G, self.c.size, None, "G")
        _freeze(self.G, self.c)

    @property
    def n(self):
        return self.c.size

    @property
    def n_g(self):
        return self.G.shape[1]

    def __repr__(self):
        return f"Zonotope(n={self.n}, n_g={self.n_g})"


class ConstrainedZonotope:
    """Zonotope whose factors additionally satisfy ``A @ xi = b``."""

    def __init__(self, G, c, A=None, b=None):
        self.c = _vector(c, "c")
        self.G = _matrix(G, self.c.size, None, "G")
        self.b = _vector(b if b is not None else [], "b")
        self.A = _matrix(A, self.b.size, self.G.shape[1], "A")
        _freeze(self.G, self.c, self.A, self.b)

    @property
    def n(self):
        return self.c.size

    @property
    def n_g(self):
        return self.G.shape[1]

    @property
    def n_c(self):
        return self.b.size

    def __repr__(self):
        return f"ConstrainedZonotope(n={self.n}, n_g={self.n_g}, n_c={self.n_c})"


class HybridZonotope:
    """Constrained zonotope extended with binary factors in ``{-1,+1}``.

    ``slack_tags`` is an ordered tuple of ``(column, row)`` pairs marking
    continuous generator columns introduced as halfspace slack factors and
    the constraint row each one belongs to.
    """

    def __init__(self, Gc, Gb, c, Ac=None, Ab=None, b=None, slack_tags=()):
        self.c = _vector(c, "c")
        n = self.c.size
        self.Gc = _matrix(Gc, n, None, "Gc")
        self.Gb = _matrix(Gb, n, None, "Gb")
        self.b = _vector(b if b is not None else [], "b")
        n_c = self.b.size
        self.Ac = _matrix(Ac, n_c, self.Gc.shape[1], "Ac")
        self.Ab = _matrix(Ab, n_c, self.Gb.shape[1], "Ab")
        self.slack_tags = tuple((int(col), int(row)) for col, row in slack_tags)
        for col, row in self.slack_tags:
            if not 0 <= col < self.n_g:
                raise ValueError(f"slack tag column {col} out of range")
            if not 0 <= row < self.n_c:
                raise ValueError(f"slack tag row {row} out of range")
        _freeze(self.Gc, self.Gb, self.c, self.Ac, self.Ab, self.b)

    @property
    def n(self):
        return self.c.size

    @property
    def n_g(self):
        return self.Gc.shape[1]

    @property
    def n_b(self):
        return self.Gb.shape[1]

    @property
    def n_c(self):
        return self.b.size

    @property
    def dims(self):
        """Representation complexity triple ``(n_g, n_b, n_c)``."""
        return (self.n_g, self.n_b, self.n_c)

    def order_dof(self):
        """Degrees-of-freedom order ``(n_g + n_b - n_c) / n``."""
        if self.n == 0:
            raise ValueError("order undefined for 0-dimensional sets")
        return (self.n_g + self.n_b - self.n_c) / self.n

    def __repr__(self):
        return (
            f"HybridZonotope(n={self.n}, n_g={self.n_g}, "
            f"n_b={self.n_b}, n_c={self.n_c})"
        )


class IntegerFeasibleSet:
    """Sorted collection of binary assignments with nonempty leaves."""

    def __init__(self, entries, n_b):
        self.n_b = int(n_b)
        arr = np.array(list(entries), dtype=np.int8)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, self.n_b)
        if arr.ndim != 2 or arr.shape[1] != self.n_b:
            raise ValueError(f"entries must have length {self.n_b}")
        if arr.size and not np.all(np.abs(arr) == 1):
            raise ValueError("assignments must have entries in {-1,+1}")
        if arr.shape[0] > 1 and self.n_b > 0:
            arr = arr[np.lexsort(arr.T[::-1])]
        if arr.shape[0] > 1 and np.any(np.all(arr[1:] == arr[:-1], axis=1)):
            raise ValueError("duplicate assignments")
        if arr.shape[0] > 2 ** self.n_b:
            raise ValueError("more assignments than 2**n_b")
        self.entries = arr
        _freeze(self.entries)

    def __len__(self):
        return self.entries.shape[0]

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, xi):
        xi = np.asarray(xi, dtype=np.int8)
        return bool(np.any(np.all(self.entries == xi, axis=1)))

    def __eq__(self, other):
        return (
            isinstance(other, IntegerFeasibleSet)
            and self.n_b == other.n_b
            and self.entries.shape == other.entries.shape
            and bool(np.all(self.entries == other.entries))
        )

    def to_matrix(self):
        """Assignments as a float matrix with one column per entry."""
        return self.entries.T.astype(float)

    def __repr__(self):
        return f"IntegerFeasibleSet(n_b={self.n_b}, size={len(self)})"


def _check_assignment(xi, length=None):
    xi = np.asarray(xi, dtype=float).ravel()
    if xi.size and not np.all(np.abs(xi) == 1.0):
        raise ValueError("binary assignment entries must be -1 or +1")
    if length is not None and xi.size != length:
        raise ValueError(f"binary assignment must have length {length}, got {xi.size}")
    return xi


def make_box(lo, hi):
    """Axis-aligned box ``[lo, hi]`` as a zonotope with diagonal generators."""
    lo = _vector(lo, "lo")
    hi = _vector(hi, "hi")
    if lo.size != hi.size:
        raise ValueError("lo and hi must have the same length")
    if np.any(lo > hi):
        raise ValueError("lo must be <= hi elementwise")
    return Zonotope(np.diag((hi - lo) / 2.0), (hi + lo) / 2.0)


def lift(z):
    """Embed a zonotope or constrained zonotope as a hybrid zonotope."""
    if isinstance(z, HybridZonotope):
        return z
    if isinstance(z, Zonotope):
        return HybridZonotope(z.G, None, z.c)
    if isinstance(z, ConstrainedZonotope):
        return HybridZonotope(z.G, None, z.c, z.A, None, z.b)
    raise TypeError(f"cannot lift {type(z).__name__}")


def leaf(Zh, xi):
    """Constrained zonotope obtained by fixing all binary factors to ``xi``."""
    xi = _check_assignment(xi, Zh.n_b)
    return ConstrainedZonotope(
        Zh.Gc, Zh.c + Zh.Gb @ xi, Zh.Ac, Zh.b - Zh.Ab @ xi
    )


def branch_node(Zh, xi_prefix, j):
    """Hybrid zonotope obtained by fixing the first ``j`` binary factors.

    The binary generator and constraint blocks are partitioned with the
    first ``j`` columns as ancestors; the remaining ``n_b - j`` factors are
    kept free for the descendants.
    """
    j = int(j)
    if not 0 <= j <= Zh.n_b:
        raise ValueError(f"layer index {j} out of range [0, {Zh.n_b}]")
    xi = _check_assignment(xi_prefix, j)
    Gb_a, Gb_d = Zh.Gb[:, :j], Zh.Gb[:, j:]
    Ab_a, Ab_d = Zh.Ab[:, :j], Zh.Ab[:, j:]
    return HybridZonotope(
        Zh.Gc,
        Gb_d,
        Zh.c + Gb_a @ xi,
        Zh.Ac,
        Ab_d,
        Zh.b - Ab_a @ xi,
        slack_tags=Zh.slack_tags,
    )


def decompose(Zh, T):
    """Leaves of ``Zh`` for every assignment in ``T``, in ``T``'s order."""
    if T.n_b != Zh.n_b:
        raise ValueError(f"T has n_b={T.n_b}, set has n_b={Zh.n_b}")
    return [leaf(Zh, xi) for xi in T]


def cartesian_product(Zh, Wh):
    """Cartesian product: block-diagonal stacking of two sets."""
    Zh, Wh = lift(Zh), lift(Wh)
    Gc = np.block(
        [
            [Zh.Gc, np.zeros((Zh.n, Wh.n_g))],
            [np.zeros((Wh.n, Zh.n_g)), Wh.Gc],
        ]
    )
    Gb = np.block(
        [
            [Zh.Gb, np.zeros((Zh.n, Wh.n_b))],
            [np.zeros((Wh.n, Zh.n_b)), Wh.Gb],
        ]
    )
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
        Gc,
        Gb,
        np.concatenate([Zh.c, Wh.c]),
        Ac,
        Ab,
        np.concatenate([Zh.b, Wh.b]),
        slack_tags=tags,
    )


def set_to_json(z):
    """Serialize a set (lifted to hybrid form) as a canonical JSON string."""
    Zh = lift(z)

    def mat(M):
        return M.tolist() if M.size else []

    payload = {
        "n": Zh.n,
        "Gc": mat(Zh.Gc),
        "Gb": mat(Zh.Gb),
        "c": Zh.c.tolist(),
        "Ac": mat(Zh.Ac),
        "Ab": mat(Zh.Ab),
        "b": Zh.b.tolist(),
        "slack_tags": [list(t) for t in Zh.slack_tags],
    }
    return json.dumps(payload, separators=(",", ":"))


def set_from_json(text):
    """Inverse of :func:`set_to_json`."""
    d = json.loads(text)
    n = int(d["n"])
    c = np.array(d["c"], dtype=float).reshape(n)
    b = np.array(d["b"], dtype=float).ravel()

    def block(key, rows):
        data = d[key]
        arr = np.array(data, dtype=float)
        if arr.size == 0:
            return arr.reshape(rows, 0)
        return arr.reshape(rows, -1)

    Gc = block("Gc", n)
    Gb = block("Gb", n)
    Ac = block("Ac", b.size)
    Ab = block("Ab", b.size)
    return HybridZonotope(Gc, Gb, c, Ac, Ab, b, slack_tags=d.get("slack_tags", ()))


def save_set(z, path):
    with open(path, "w") as fh:
        fh.write(set_to_json(z))
        fh.write("\n")


def load_set(path):
    with open(path) as fh:
        return set_from_json(fh.read())
