"""Integral diagnostics and blow-up detection for PDE fields."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

DIAG_COLUMNS = ("t", "mass", "energy", "G", "Gx1", "Gx2", "Gx1x2", "F1", "F2", "max_grad_pi", "min_pi", "max_pi")

BOUNDED = "bounded"
BLOWUP = "blowup"
GRAD_THRESHOLD = 1e3


@dataclass
class Moments:
    t: float
    mass: float
    energy: float
    G: float
    Gx1: float
    Gx2: float
    Gx1x2: float
    F1: float
    F2: float
    max_grad_pi: float
    min_pi: float
    max_pi: float

    def row(self):
        return [asdict(self)[k] for k in DIAG_COLUMNS]


def density(Pi, R0, params):
    """``rho = gamma / (c0 (gamma - 1)) (Pi - R0)^(1/(gamma - 1))``, zero where ``Pi <= R0``."""
    g = params.gamma
    excess = np.maximum(Pi - R0, 0.0)
    return g / (params.c0 * (g - 1.0)) * excess ** (1.0 / (g - 1.0))


def max_gradient(Pi, grid):
    gx, gy = np.gradient(Pi, grid.hx, grid.hy)
    return float(np.max(np.hypot(gx, gy)))


def diagnostics(field, grid, params, R0):
    """Quadrature moments of the finite-mass part ``Pi - R0`` of the field."""
    X, Y = grid.mesh()
    dA = grid.cell_area
    g = params.gamma
    U1, U2, Pi = field.U1, field.U2, field.Pi
    rho = density(Pi, R0, params)
    excess = np.maximum(Pi - R0, 0.0)
    p = excess ** (g / (g - 1.0))
    gx1 = 0.5 * np.sum(rho * X * X) * dA
    gx2 = 0.5 * np.sum(rho * Y * Y) * dA
    return Moments(
        t=float(field.time),
        mass=float(np.sum(rho) * dA),
        energy=float(np.sum(0.5 * rho * (U1 * U1 + U2 * U2) + p / (g - 1.0)) * dA),
        G=float(gx1 + gx2),
        Gx1=float(gx1),
        Gx2=float(gx2),
        Gx1x2=float(0.5 * np.sum(rho * X * Y) * dA),
        F1=float(np.sum((U1 * X + U2 * Y) * rho) * dA),
        F2=float(np.sum((U1 * Y - U2 * X) * rho) * dA),
        max_grad_pi=max_gradient(Pi, grid),
        min_pi=float(np.min(Pi)),
        max_pi=float(np.max(Pi)),
    )


def moment_identity_residuals(series, l):
    """Residuals of ``G' = F1`` and ``F2' = l F1`` along a diagnostics time series.

    Derivatives are centred differences; returns two arrays for the
    interior samples.
    """
    t = np.array([m.t for m in series])
    G = np.array([m.G for m in series])
    F1 = np.array([m.F1 for m in series])
    F2 = np.array([m.F2 for m in series])
    if len(t) < 3:
        return np.array([]), np.array([])
    dG = (G[2:] - G[:-2]) / (t[2:] - t[:-2])
    dF2 = (F2[2:] - F2[:-2]) / (t[2:] - t[:-2])
    return dG - F1[1:-1], dF2 - l * F1[1:-1]


def detect_blowup(field, grid, initial_max_grad, threshold=GRAD_THRESHOLD):
    """``blowup`` if any value is non-finite or ``max|grad Pi|`` exceeds ``threshold`` times its initial value."""
    if not field.is_finite():
        return BLOWUP
    if initial_max_grad > 0 and max_gradient(field.Pi, grid) > threshold * initial_max_grad:
        return BLOWUP
    return BOUNDED


def core_gradient(field, grid, half=2):
    """Velocity-gradient matrix ``[[a, b], [c, d]]`` at the grid centre.

    Least squares over the ``(2 half + 1)^2`` stencil nearest the origin
    with all monomials up to degree three, so the fitted linear part is
    not biased by the cubic term of the profile.
    """
    X, Y = grid.mesh()
    i0, j0 = grid.nx // 2, grid.ny // 2
    sx = slice(i0 - half, i0 + half + 1)
    sy = slice(j0 - half, j0 + half + 1)
    x, y = X[sx, sy].ravel(), Y[sx, sy].ravel()
    cols = [np.ones_like(x), x, y, x * x, x * y, y * y, x**3, x * x * y, x * y * y, y**3]
    M = np.stack(cols, axis=1)
    Q = np.empty((2, 2))
    for comp in (0, 1):
        coef, *_ = np.linalg.lstsq(M, field.u[comp][sx, sy].ravel(), rcond=None)
        Q[comp] = coef[1:3]
    return Q
