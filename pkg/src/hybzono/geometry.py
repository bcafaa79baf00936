"""Output geometry: support-sampled polygon over-approximations and metrics.

2-D projections are sampled along uniformly spaced directions; the
supporting halfplanes are intersected by an angular sweep into a convex
polygon.  Polygons are tight in every sampled direction (the polygon's
support there equals the set's) and contain the projected set.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .queries import EmptySetError, support
from .sets import decompose, lift
from .setops import linear_map

__all__ = [
    "PolygonSample",
    "project_sample",
    "halfplane_polygon",
    "metrics_table",
    "metrics_to_csv",
    "polygons_to_json",
]

DROP_TOL = 1e-10


@dataclass
class PolygonSample:
    directions: np.ndarray  # (k, 2) unit vectors
    offsets: np.ndarray  # (k,) support values
    vertices: np.ndarray  # (v, 2) counterclockwise polygon
    xi_b: np.ndarray | None = None  # leaf assignment when sampled per leaf


def _intersect(d1, o1, d2, o2):
    A = np.array([d1, d2])
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if abs(det) < 1e-14:
        return None
    return np.linalg.solve(A, np.array([o1, o2]))


def halfplane_polygon(directions, offsets, drop_tol=DROP_TOL):
    """Vertices of ``{x : directions @ x <= offsets}`` by angular sweep.

    Directions must be sorted by angle and span the full circle (the
    intersection is bounded).  Halfplanes that are redundant within
    ``drop_tol`` are dropped; degenerate polygons may return fewer than
    three vertices (a segment or a point).
    """
    k = len(offsets)
    idx = list(range(k))

    def vertex(i, j):
        return _intersect(directions[i], offsets[i], directions[j], offsets[j])

    # Iteratively drop halfplanes made redundant by their angular neighbors.
    changed = True
    guard = 0
    while changed and len(idx) > 2 and guard < 10 * k:
        changed = False
        guard += 1
        for pos in range(len(idx)):
            prev = idx[(pos - 1) % len(idx)]
            cur = idx[pos]
            nxt = idx[(pos + 1) % len(idx)]
            if prev == nxt:
                break
            v = vertex(prev, nxt)
            if v is not None and directions[cur] @ v <= offsets[cur] + drop_tol:
                idx.pop(pos)
                changed = True
                break

    verts = []
    for pos in range(len(idx)):
        v = vertex(idx[pos], idx[(pos + 1) % len(idx)])
        if v is not None:
            verts.append(v)
    if not verts:
        return np.zeros((0, 2))
    out = [verts[0]]
    for v in verts[1:]:
        if np.linalg.norm(v - out[-1]) > 1e-9:
            out.append(v)
    if len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= 1e-9:
        out.pop()
    return np.array(out)


def sample_directions(n_dirs):
    """Deterministic unit directions at uniformly spaced angles from 0."""
    angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def project_sample(Zh, axes, n_dirs=250, per_leaf=False, T=None, node_budget=None):
    """Polygon over-approximations of a 2-D projection.

    Projects onto coordinates ``axes`` and samples the support function in
    ``n_dirs`` uniformly spaced directions, either for the whole set or one
    polygon per nonempty leaf (requires ``T`` or enumerates it).
    """
    Zh = lift(Zh)
    i, j = axes
    if not (0 <= i < Zh.n and 0 <= j < Zh.n and i != j):
        raise ValueError(f"invalid projection axes {axes} for dimension {Zh.n}")
    S = np.zeros((2, Zh.n))
    S[0, i] = 1.0
    S[1, j] = 1.0
    flat = linear_map(S, Zh)
    dirs = sample_directions(n_dirs)

    if per_leaf:
        if T is None:
            from .queries import enumerate_integer_feasible

            T = enumerate_integer_feasible(Zh, node_budget=node_budget)
        targets = [
            (lift(zc), np.asarray(xi, dtype=np.int8))
            for zc, xi in zip(decompose(flat, T), T)
        ]
    else:
        targets = [(flat, None)]

    samples = []
    for set_2d, xi in targets:
        offsets = np.array(
            [support(set_2d, d, node_budget=node_budget)[0] for d in dirs]
        )
        samples.append(
            PolygonSample(
                directions=dirs,
                offsets=offsets,
                vertices=halfplane_polygon(dirs, offsets),
                xi_b=xi,
            )
        )
    return samples


def metrics_table(result, reduced=False):
    """Per-step metric rows mirroring the reachability tables."""
    rows = []
    suffix = "r" if reduced else ""
    sizes = result.tree_sizes()
    for k, dims in enumerate(result.dims):
        rows.append(
            {
                "set": f"R{k}{suffix}",
                "n_g": dims[0],
                "n_b": dims[1],
                "n_c": dims[2],
                "T": sizes[k] if sizes[k] is not None else "",
                "time": f"{result.timings[k]:.4f}" if k < len(result.timings) else "",
            }
        )
    return rows


def metrics_to_csv(rows):
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["set", "n_g", "n_b", "n_c", "T", "time"])
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def polygons_to_json(axes, samples):
    leaves = []
    for s in samples:
        leaves.append(
            {
                "xi_b": [int(v) for v in s.xi_b] if s.xi_b is not None else None,
                "vertices": [[float(x), float(y)] for x, y in s.vertices],
            }
        )
    return json.dumps(
        {"axes": [int(axes[0]), int(axes[1])], "leaves": leaves},
        separators=(",", ":"),
    )
