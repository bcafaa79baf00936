"""Mixed logical dynamical (MLD) system models and the built-in case studies.

An MLD system couples a linear update

    x+ = A x + Bu u + Bw w + Baff

with mixed-integer inequality constraints

    Ex x + Eu u + Ew w <= Eaff

over continuous/binary states ``x``, inputs ``u`` and auxiliary variables
``w``.  Binary coordinates carry {0,1} semantics in the model and are
realized as hybrid-zonotope factors through the affine change
``delta = 0.5 + 0.5 * xi_b`` at set-construction boundaries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .sets import HybridZonotope, cartesian_product, lift, make_box, set_from_json
from .sets import set_to_json as _set_to_json

__all__ = [
    "MldDims",
    "MldSystem",
    "DomainSets",
    "validate",
    "zoh_discretize",
    "encode_indicator",
    "build_pwa_two_mode",
    "build_heated_rooms",
    "build_domain_W",
    "mld_to_json",
    "mld_from_json",
    "save_model",
    "load_model",
]


@dataclass(frozen=True)
class MldDims:
    n_xc: int
    n_xl: int
    n_uc: int
    n_ul: int
    n_rc: int
    n_rl: int
    n_e: int

    @property
    def n(self):
        return self.n_xc + self.n_xl

    @property
    def n_u(self):
        return self.n_uc + self.n_ul

    @property
    def n_r(self):
        return self.n_rc + self.n_rl


@dataclass
class MldSystem:
    A: np.ndarray
    Bu: np.ndarray
    Bw: np.ndarray
    Baff: np.ndarray
    Ex: np.ndarray
    Eu: np.ndarray
    Ew: np.ndarray
    Eaff: np.ndarray
    dims: MldDims
    w_bounds: np.ndarray | None = None  # (n_rc, 2) ranges of continuous auxiliaries

    def __post_init__(self):
        for name in ("A", "Bu", "Bw", "Ex", "Eu", "Ew"):
            setattr(self, name, np.atleast_2d(np.asarray(getattr(self, name), dtype=float)))
        self.Baff = np.asarray(self.Baff, dtype=float).ravel()
        self.Eaff = np.asarray(self.Eaff, dtype=float).ravel()
        d = self.dims
        if min(d.n_xc, d.n_xl, d.n_uc, d.n_ul, d.n_rc, d.n_rl, d.n_e) < 0:
            return  # malformed dims; validate() reports them
        # Normalize potentially empty blocks to their declared shapes.
        self.Bu = self.Bu.reshape(d.n, d.n_u) if self.Bu.size else np.zeros((d.n, d.n_u))
        self.Bw = self.Bw.reshape(d.n, d.n_r) if self.Bw.size else np.zeros((d.n, d.n_r))
        self.Eu = self.Eu.reshape(d.n_e, d.n_u) if self.Eu.size else np.zeros((d.n_e, d.n_u))
        self.Ew = self.Ew.reshape(d.n_e, d.n_r) if self.Ew.size else np.zeros((d.n_e, d.n_r))
        self.Ex = self.Ex.reshape(d.n_e, d.n) if self.Ex.size else np.zeros((d.n_e, d.n))
        if self.w_bounds is not None:
            self.w_bounds = np.asarray(self.w_bounds, dtype=float).reshape(-1, 2)


@dataclass
class DomainSets:
    """State, input, and auxiliary-variable domains in hybrid zonotope form."""

    X: HybridZonotope
    U: HybridZonotope
    W: HybridZonotope


def validate(m):
    """Shape and finiteness checks; returns the list of violations (empty = ok)."""
    errors = []
    d = m.dims
    for name in ("n_xc", "n_xl", "n_uc", "n_ul", "n_rc", "n_rl", "n_e"):
        if getattr(d, name) < 0:
            errors.append(f"dims.{name} is negative")
    if errors:
        return errors
    expected = {
        "A": (d.n, d.n),
        "Bu": (d.n, d.n_u),
        "Bw": (d.n, d.n_r),
        "Ex": (d.n_e, d.n),
        "Eu": (d.n_e, d.n_u),
        "Ew": (d.n_e, d.n_r),
    }
    for name, shape in expected.items():
        got = getattr(m, name).shape
        if got != shape:
            errors.append(f"{name} must be {shape}, got {got}")
    if m.Baff.shape != (d.n,):
        errors.append(f"Baff must have length {d.n}, got {m.Baff.shape[0]}")
    if m.Eaff.shape != (d.n_e,):
        errors.append(f"Eaff must have length {d.n_e}, got {m.Eaff.shape[0]}")
    for name in ("A", "Bu", "Bw", "Baff", "Ex", "Eu", "Ew", "Eaff"):
        if not np.all(np.isfinite(getattr(m, name))):
            errors.append(f"{name} contains non-finite entries")
    if m.w_bounds is not None and m.w_bounds.shape != (d.n_rc, 2):
        errors.append(f"w_bounds must be ({d.n_rc}, 2), got {m.w_bounds.shape}")
    return errors


# ---------------------------------------------------------------------------
# Discretization


def _expm(M):
    """Matrix exponential by scaling and squaring of a truncated series."""
    n = M.shape[0]
    if n == 0:
        return M.copy()
    norm = np.linalg.norm(M, np.inf)
    s = max(0, int(np.ceil(np.log2(norm / 0.5)))) if norm > 0.5 else 0
    T = M / (2.0 ** s)
    E = np.eye(n)
    term = np.eye(n)
    for k in range(1, 80):
        term = term @ T / k
        E = E + term
        if np.linalg.norm(term, np.inf) <= 1e-16 * np.linalg.norm(E, np.inf):
            break
    for _ in range(s):
        E = E @ E
    return E


def zoh_discretize(Ac, Bc, f, Ts):
    """Exact zero-order-hold discretization of ``xdot = Ac x + Bc u + f``.

    Returns ``(Ad, Bd, fd)`` from the augmented-matrix exponential.
    """
    Ac = np.atleast_2d(np.asarray(Ac, dtype=float))
    if Ac.shape[0] != Ac.shape[1]:
        raise ValueError(f"Ac must be square, got {Ac.shape}")
    n = Ac.shape[0]
    Bc = np.asarray(Bc, dtype=float)
    Bc = Bc.reshape(n, -1) if Bc.size else np.zeros((n, 0))
    f = np.asarray(f, dtype=float).ravel()
    if f.size == 0:
        f = np.zeros(n)
    if Ts <= 0:
        raise ValueError("Ts must be positive")
    m = Bc.shape[1]
    aug = np.zeros((n + m + 1, n + m + 1))
    aug[:n, :n] = Ac
    aug[:n, n : n + m] = Bc
    aug[:n, -1] = f
    E = _expm(aug * Ts)
    return E[:n, :n], E[:n, n : n + m], E[:n, -1]


# ---------------------------------------------------------------------------
# Big-M encoders


def encode_indicator(row, threshold, sense, delta_index, bounds, eps=1e-6):
    """Two inequality rows tying a binary to a linear condition.

    With ``sense="le"`` the rows enforce ``delta = 1  <=>  row @ v <= threshold``
    over the bounded domain (``delta = 0`` forces ``row @ v >= threshold + eps``).
    ``sense="ge"`` is the mirrored condition.  ``bounds`` is an ``(nv, 2)``
    array of per-variable intervals used to derive tight big-M constants;
    ``delta_index`` addresses the binary inside the same stacked vector.

    Returns ``(rows, rhs)`` with ``rows`` of shape ``(2, nv)``.
    """
    row = np.asarray(row, dtype=float).ravel()
    bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
    if bounds.shape[0] != row.size:
        raise ValueError("bounds must cover every variable in the row")
    if not np.all(np.isfinite(bounds)):
        raise ValueError("indicator encoding requires a bounded domain")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if row[delta_index] != 0.0:
        raise ValueError("guard row must not involve the indicator binary")
    pos = np.clip(row, 0.0, None)
    neg = row - pos
    M = float(pos @ bounds[:, 1] + neg @ bounds[:, 0])
    m = float(pos @ bounds[:, 0] + neg @ bounds[:, 1])
    theta = float(threshold)
    r1 = row.copy()
    r2 = -row
    if sense == "le":
        r1[delta_index] = M - theta
        rhs1 = M
        r2[delta_index] = m - theta - eps
        rhs2 = -(theta + eps)
    elif sense == "ge":
        r1, r2 = -row, row.copy()
        r1[delta_index] = theta - m
        rhs1 = -m
        r2[delta_index] = -(M - theta + eps)
        rhs2 = theta - eps
    else:
        raise ValueError(f"sense must be 'le' or 'ge', got {sense!r}")
    return np.vstack([r1, r2]), np.array([rhs1, rhs2])


# ---------------------------------------------------------------------------
# Case study: piecewise-affine system with two equilibria

PWA_A1 = np.array([[0.75, 0.25], [-0.25, 0.75]])
PWA_A2 = np.array([[0.75, -0.25], [0.25, 0.75]])
PWA_AFF1 = np.array([-0.25, -0.25])
PWA_AFF2 = np.array([0.25, -0.25])
PWA_STATE_BOX = 5.0
PWA_EPS = 1e-6


def build_pwa_two_mode():
    """Two-mode autonomous PWA system as an MLD model.

    The mode indicator selects the ``x1 <= 0`` dynamics; the difference
    between the two affine maps enters through two continuous auxiliaries
    gated by four big-M rows each, for ten inequality rows total.
    """
    dims = MldDims(n_xc=2, n_xl=0, n_uc=0, n_ul=0, n_rc=2, n_rl=1, n_e=10)
    dA = PWA_A1 - PWA_A2
    da = PWA_AFF1 - PWA_AFF2

    # Variable stacking for inequality rows: (x1, x2, w1, w2, delta).
    nv = 5
    lim = PWA_STATE_BOX
    x_bounds = np.array([[-lim, lim], [-lim, lim]])
    # Ranges of v_i(x) = dA[i] @ x + da[i] over the state box.
    v_lo = -np.abs(dA) @ np.full(2, lim) + da
    v_hi = np.abs(dA) @ np.full(2, lim) + da
    bounds = np.vstack([x_bounds, np.column_stack([v_lo, v_hi]), [0.0, 1.0]])

    rows = []
    rhs = []
    guard = np.zeros(nv)
    guard[0] = 1.0
    g_rows, g_rhs = encode_indicator(guard, 0.0, "le", 4, bounds, eps=PWA_EPS)
    rows.extend(g_rows)
    rhs.extend(g_rhs)

    # w_i = delta * v_i(x) via the standard four-row product encoding.
    for i in range(2):
        e_w = np.zeros(nv)
        e_w[2 + i] = 1.0
        v_row = np.zeros(nv)
        v_row[:2] = dA[i]
        v0 = da[i]
        lo_i, hi_i = v_lo[i], v_hi[i]
        d = np.zeros(nv)
        d[4] = 1.0
        rows.append(e_w - hi_i * d)
        rhs.append(0.0)
        rows.append(-e_w + lo_i * d)
        rhs.append(0.0)
        rows.append(e_w - v_row - lo_i * d)
        rhs.append(-lo_i + v0)
        rows.append(-e_w + v_row + hi_i * d)
        rhs.append(hi_i - v0)

    E = np.array(rows)
    model = MldSystem(
        A=PWA_A2,
        Bu=np.zeros((2, 0)),
        Bw=np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]),
        Baff=PWA_AFF2,
        Ex=E[:, :2],
        Eu=np.zeros((10, 0)),
        Ew=E[:, 2:],
        Eaff=np.array(rhs),
        dims=dims,
        w_bounds=np.column_stack([v_lo, v_hi]),
    )
    X = lift(make_box([-lim, -lim], [lim, lim]))
    U = lift(make_box([], []))
    domains = DomainSets(X=X, U=U, W=build_domain_W(model, X, U))
    return model, domains


def pwa_initial_set():
    """Initial state zonotope of the PWA case study."""
    from .sets import Zonotope

    return Zonotope(np.array([[0.25, -0.19], [0.19, 0.25]]), np.array([-1.31, 2.55]))


# ---------------------------------------------------------------------------
# Case study: thermostat-controlled heated rooms

ROOMS_HEAT_POWER = 15.0
ROOMS_WALL_COEFF = 0.08
ROOMS_ON_BELOW = 22.0
ROOMS_OFF_ABOVE = 24.0
ROOMS_TEMP_LO = 15.0
ROOMS_TEMP_HI = 30.0
ROOMS_TS = 0.01
ROOMS_EPS = 1e-6


def rooms_continuous(p):
    """Continuous-time matrices of the chain of ``3p`` rooms.

    Rooms form a chain with unit heat transfer between neighbors.  End
    rooms expose three walls, interior rooms two, so the ambient coupling
    is ``0.08 * q`` per room.  Heaters sit in every third room.
    """
    n = 3 * p
    Acc = np.zeros((n, n))
    for i in range(n):
        deg = (1 if i > 0 else 0) + (1 if i < n - 1 else 0)
        q = 3 if i in (0, n - 1) else 2
        Acc[i, i] = -(ROOMS_WALL_COEFF * q + deg)
        if i > 0:
            Acc[i, i - 1] = 1.0
        if i < n - 1:
            Acc[i, i + 1] = 1.0
    heater_rooms = [3 * j + 2 for j in range(p)]
    Ch = np.zeros((n, p))
    for j, r in enumerate(heater_rooms):
        Ch[r, j] = ROOMS_HEAT_POWER
    Bu = np.array([[ROOMS_WALL_COEFF * (3 if i in (0, n - 1) else 2)] for i in range(n)])
    return Acc, Ch, Bu, heater_rooms


def build_heated_rooms(p):
    """Thermostat-controlled heated rooms with ``p`` heater blocks.

    Each heater contributes one binary state, three auxiliary binaries
    (below-threshold, above-threshold, next heater state) and nine
    inequality rows; the redundant mutual-exclusion row keeps the
    per-heater count at nine.
    """
    if p not in (1, 2, 3, 4):
        raise ValueError(f"block count must be in 1..4, got {p}")
    n_rooms = 3 * p
    Acc, Ch, Bu_c, heater_rooms = rooms_continuous(p)
    Ad, Bd, _ = zoh_discretize(Acc, np.hstack([Ch, Bu_c]), np.zeros(n_rooms), ROOMS_TS)
    Bd_h, Bd_u = Bd[:, :p], Bd[:, p:]

    n = n_rooms + p
    dims = MldDims(n_xc=n_rooms, n_xl=p, n_uc=1, n_ul=0, n_rc=0, n_rl=3 * p, n_e=9 * p)
    A = np.zeros((n, n))
    A[:n_rooms, :n_rooms] = Ad
    A[:n_rooms, n_rooms:] = Bd_h
    Bu = np.vstack([Bd_u, np.zeros((p, 1))])
    Bw = np.zeros((n, 3 * p))
    for j in range(p):
        Bw[n_rooms + j, 3 * j + 2] = 1.0  # h+ = delta3
    Baff = np.zeros(n)

    # Inequality rows over (x, u, w).
    nv = n + 1 + 3 * p
    bounds = np.vstack(
        [
            np.tile([ROOMS_TEMP_LO, ROOMS_TEMP_HI], (n_rooms, 1)),
            np.tile([0.0, 1.0], (p, 1)),
            [[0.0, 0.1]],
            np.tile([0.0, 1.0], (3 * p, 1)),
        ]
    )
    rows = []
    rhs = []
    for j, r in enumerate(heater_rooms):
        i_d1 = n + 1 + 3 * j
        i_d2 = i_d1 + 1
        i_d3 = i_d1 + 2
        i_h = n_rooms + j
        guard = np.zeros(nv)
        guard[r] = 1.0
        g1, b1 = encode_indicator(guard, ROOMS_ON_BELOW, "le", i_d1, bounds, eps=ROOMS_EPS)
        g2, b2 = encode_indicator(guard, ROOMS_OFF_ABOVE, "ge", i_d2, bounds, eps=ROOMS_EPS)
        rows.extend(g1)
        rhs.extend(b1)
        rows.extend(g2)
        rhs.extend(b2)
        # delta3 = delta1 or (h and not delta2), plus mutual exclusion.
        for coeffs, r0 in (
            ({i_d1: 1.0, i_d3: -1.0}, 0.0),
            ({i_h: 1.0, i_d2: -1.0, i_d3: -1.0}, 0.0),
            ({i_d3: 1.0, i_d1: -1.0, i_h: -1.0}, 0.0),
            ({i_d3: 1.0, i_d1: -1.0, i_d2: 1.0}, 1.0),
            ({i_d1: 1.0, i_d2: 1.0}, 1.0),
        ):
            row = np.zeros(nv)
            for k, v in coeffs.items():
                row[k] = v
            rows.append(row)
            rhs.append(r0)
    E = np.array(rows)
    model = MldSystem(
        A=A,
        Bu=Bu,
        Bw=Bw,
        Baff=Baff,
        Ex=E[:, :n],
        Eu=E[:, n : n + 1],
        Ew=E[:, n + 1 :],
        Eaff=np.array(rhs),
        dims=dims,
        w_bounds=np.zeros((0, 2)),
    )
    temp_box = lift(
        make_box(np.full(n_rooms, ROOMS_TEMP_LO), np.full(n_rooms, ROOMS_TEMP_HI))
    )
    h_block = HybridZonotope(
        np.zeros((p, 0)), 0.5 * np.eye(p), np.full(p, 0.5)
    )
    X = cartesian_product(temp_box, h_block)
    U = lift(make_box([0.0], [0.1]))
    domains = DomainSets(X=X, U=U, W=build_domain_W(model, X, U))
    return model, domains


def rooms_initial_set(p):
    """Initial set: temperature box around the nominal profile, heaters on."""
    s = np.array([23.0, 23.5, 23.5, 22.5, 23.0, 22.5])
    centers = np.concatenate([s, s])[: 3 * p]
    box = make_box(centers - 0.1, centers + 0.1)
    heaters_on = HybridZonotope(np.zeros((p, 0)), np.zeros((p, 0)), np.ones(p))
    return cartesian_product(lift(box), heaters_on)


def build_domain_W(m, X, U):
    """Auxiliary-variable domain: big-M box times {0,1} per binary auxiliary."""
    d = m.dims
    if d.n_rc:
        if m.w_bounds is None or m.w_bounds.shape != (d.n_rc, 2):
            raise ValueError("missing big-M bounds for continuous auxiliaries")
        lo, hi = m.w_bounds[:, 0], m.w_bounds[:, 1]
        cont = lift(make_box(lo, hi))
    else:
        cont = lift(make_box([], []))
    if d.n_rl:
        bins = HybridZonotope(
            np.zeros((d.n_rl, 0)), 0.5 * np.eye(d.n_rl), np.full(d.n_rl, 0.5)
        )
        return cartesian_product(cont, bins) if d.n_rc else bins
    return cont


# ---------------------------------------------------------------------------
# Serialization


def mld_to_json(m, domains):
    d = m.dims

    def mat(M):
        return M.tolist() if M.size else []

    payload = {
        "dims": {
            "n_xc": d.n_xc,
            "n_xl": d.n_xl,
            "n_uc": d.n_uc,
            "n_ul": d.n_ul,
            "n_rc": d.n_rc,
            "n_rl": d.n_rl,
            "n_e": d.n_e,
        },
        "A": mat(m.A),
        "Bu": mat(m.Bu),
        "Bw": mat(m.Bw),
        "Baff": m.Baff.tolist(),
        "Ex": mat(m.Ex),
        "Eu": mat(m.Eu),
        "Ew": mat(m.Ew),
        "Eaff": m.Eaff.tolist(),
        "X": json.loads(_set_to_json(domains.X)),
        "U": json.loads(_set_to_json(domains.U)),
        "W": json.loads(_set_to_json(domains.W)),
    }
    return json.dumps(payload, separators=(",", ":"))


def mld_from_json(text):
    d = json.loads(text)
    dims = MldDims(**{k: int(v) for k, v in d["dims"].items()})

    def mat(key, shape):
        arr = np.array(d[key], dtype=float)
        return arr.reshape(shape) if arr.size else np.zeros(shape)

    model = MldSystem(
        A=mat("A", (dims.n, dims.n)),
        Bu=mat("Bu", (dims.n, dims.n_u)),
        Bw=mat("Bw", (dims.n, dims.n_r)),
        Baff=mat("Baff", (dims.n,)),
        Ex=mat("Ex", (dims.n_e, dims.n)),
        Eu=mat("Eu", (dims.n_e, dims.n_u)),
        Ew=mat("Ew", (dims.n_e, dims.n_r)),
        Eaff=mat("Eaff", (dims.n_e,)),
        dims=dims,
    )
    domains = DomainSets(
        X=set_from_json(json.dumps(d["X"])),
        U=set_from_json(json.dumps(d["U"])),
        W=set_from_json(json.dumps(d["W"])),
    )
    return model, domains


def save_model(m, domains, path):
    with open(path, "w") as fh:
        fh.write(mld_to_json(m, domains))
        fh.write("\n")


def load_model(path):
    with open(path) as fh:
        return mld_from_json(fh.read())
