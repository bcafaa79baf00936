"""Independent oracles for the two case studies.

These simulate the hybrid dynamics directly (no MLD encoding, no set
machinery) so the tests can cross-check the library against ground truth.
"""

import numpy as np

from hybzono.mld import (
    PWA_A1,
    PWA_A2,
    PWA_AFF1,
    PWA_AFF2,
    ROOMS_OFF_ABOVE,
    ROOMS_ON_BELOW,
    ROOMS_TS,
    rooms_continuous,
    zoh_discretize,
)


def pwa_step(x):
    """Direct evaluation of the two-mode piecewise-affine map."""
    x = np.asarray(x, dtype=float)
    if x[0] <= 0.0:
        return PWA_A1 @ x + PWA_AFF1
    return PWA_A2 @ x + PWA_AFF2


def pwa_step_many(X):
    """Vectorized PWA map over rows of ``X``."""
    X = np.asarray(X, dtype=float)
    top = X @ PWA_A1.T + PWA_AFF1
    bottom = X @ PWA_A2.T + PWA_AFF2
    mask = (X[:, 0] <= 0.0)[:, None]
    return np.where(mask, top, bottom)


class RoomsSimulator:
    """Exact closed-loop step of the thermostat-controlled rooms."""

    def __init__(self, p):
        self.p = p
        Acc, Ch, Bu, heater_rooms = rooms_continuous(p)
        Ad, Bd, _ = zoh_discretize(Acc, np.hstack([Ch, Bu]), np.zeros(3 * p), ROOMS_TS)
        self.Ad = Ad
        self.Bh = Bd[:, :p]
        self.Bu = Bd[:, p:]
        self.heater_rooms = heater_rooms

    def thermostat(self, temps, h):
        """Next heater state: turn on below 22, off above 24, else hold."""
        sensed = temps[..., self.heater_rooms]
        on = sensed <= ROOMS_ON_BELOW
        off = sensed >= ROOMS_OFF_ABOVE
        return np.where(on, 1.0, np.where(off, 0.0, h))

    def step(self, temps, h, u):
        temps = np.asarray(temps, dtype=float)
        h = np.asarray(h, dtype=float)
        u = np.asarray(u, dtype=float)
        next_temps = (
            temps @ self.Ad.T + h @ self.Bh.T + np.outer(u, self.Bu[:, 0])
            if temps.ndim == 2
            else self.Ad @ temps + self.Bh @ h + self.Bu[:, 0] * u
        )
        next_h = self.thermostat(temps, h)
        return next_temps, next_h
