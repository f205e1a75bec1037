"""Steady localized vortices with a linear-profile core.

For a radial angular rate ``w(r)`` the field ``U = w(r) (x2, -x1)`` is
steady when ``c0 dPi/dr = r (w^2 - l w)``.  Two stream-function families
are provided:

* exponential, ``w = B0 sigma exp(-sigma r^2 / 2)``;
* power law, ``w = B0 sigma s^(-q-1)`` with ``s = 1 + sigma r^2 / 2``.

Both have core half-vorticity ``b* = B0 sigma``.  Scaling ``U1`` by
``k != 1`` breaks the balance and seeds the asymmetric perturbation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field2D

EXPONENTIAL = "exponential"
POWERLAW = "powerlaw"


class InadmissibleInitialData(ValueError):
    """The sampled pressure is not positive everywhere."""


@dataclass(frozen=True)
class InitialData:
    """Parameters of a localized vortex.

    Defaults are the geophysical values: ``sigma = 1e-9 m^-2``, ``R0 = 10``.
    """

    family: str = EXPONENTIAL
    B0: float = -1000.0
    sigma: float = 1e-9
    k: float = 1.0
    R0: float = 10.0
    q: float | None = None

    def __post_init__(self):
        if self.family not in (EXPONENTIAL, POWERLAW):
            raise ValueError(f"unknown family {self.family!r}")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.family == POWERLAW and (self.q is None or self.q <= 0):
            raise ValueError("powerlaw family needs q > 0")

    @property
    def b_star(self):
        return self.B0 * self.sigma


def angular_rate(init, r2):
    """``w(r)`` evaluated on ``r2 = x1^2 + x2^2``."""
    bs = init.B0 * init.sigma
    if init.family == EXPONENTIAL:
        return bs * np.exp(-0.5 * init.sigma * r2)
    return bs * (1.0 + 0.5 * init.sigma * r2) ** (-init.q - 1.0)


def pressure_anomaly(init, r2, params):
    """``Pi - R0`` of the balanced state."""
    B0, sg, l, c0 = init.B0, init.sigma, params.l, params.c0
    if init.family == EXPONENTIAL:
        e = np.exp(-0.5 * sg * r2)
        return -(B0 * B0 * sg * e * e - 2.0 * l * B0 * e) / (2.0 * c0)
    q = init.q
    s = 1.0 + 0.5 * sg * r2
    return -(-(B0 * l / q) * s ** (-q) + B0 * B0 * sg / (2.0 * q + 1.0) * s ** (-2.0 * q - 1.0)) / c0


def anomaly_at_origin(init, params):
    return float(pressure_anomaly(init, 0.0, params))


def sample(init, grid, params):
    """Closed-form fields on the grid; no positivity check."""
    X, Y = grid.mesh()
    r2 = X * X + Y * Y
    w = angular_rate(init, r2)
    u = np.empty((3,) + X.shape)
    u[0] = init.k * w * Y
    u[1] = -w * X
    u[2] = init.R0 + pressure_anomaly(init, r2, params)
    return Field2D(u, 0.0)


def build_steady(init, grid, params, check_decay=True):
    """Sample the vortex and validate it.

    Raises
    ------
    InadmissibleInitialData
        If ``Pi <= 0`` anywhere on the grid.
    ValueError
        If ``check_decay`` and ``|U|`` on the boundary exceeds ``1e-6 max|U|``.
    """
    f = sample(init, grid, params)
    pmin = float(np.min(f.Pi))
    if pmin <= 0:
        raise InadmissibleInitialData(f"Pi <= 0 on the grid (min {pmin:.6g}); raise R0 or lower |B0|")
    if check_decay and init.B0 != 0:
        speed = np.hypot(f.U1, f.U2)
        edge = max(
            np.max(speed[0]),
            np.max(speed[-1]),
            np.max(speed[:, 0]),
            np.max(speed[:, -1]),
        )
        if edge >= 1e-6 * np.max(speed):
            raise ValueError("domain too small: boundary |U| exceeds 1e-6 max|U|")
    return f


def gx1_exponential_gamma2(B0, sigma, l, c0):
    """``G_x1(0)`` of the exponential vortex for ``gamma = 2`` over the whole plane.

    ``rho = (2/c0)(Pi - R0)`` integrates in closed form to
    ``-pi B0 (B0 sigma - 8 l) / (4 sigma^2 c0^2)``; the anomaly must be
    non-negative everywhere (``0 <= B0 sigma <= 2 l``) for it to equal the
    clipped quadrature.
    """
    return -np.pi * B0 * (B0 * sigma - 8.0 * l) / (4.0 * sigma * sigma * c0 * c0)
