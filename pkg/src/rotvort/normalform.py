"""Third-order normal form at the steady vortex.

The reduced 6-dimensional system is written in the eigenbasis of its
linearisation, ``dx_nu/dt = lambda_nu x_nu + sum a^nu_jh x_j x_h + sum
b^nu_jhk x_j x_h x_k``, with ``nu`` in ``+-1, +-2, +-3``.  A near-identity
quadratic change of variables removes the quadratic terms and leaves

    dy_nu/dt = lambda_nu y_nu + y_nu (g^nu_1 y_1 y_-1 + g^nu_2 y_2 y_-2 + g^nu_3 y_3 y_-3).

The equilibrium passes the neutrality check when every ``g`` is purely
imaginary.  All computations use units with ``l = c0 = 1``; only ``b*/l``
and ``gamma`` enter.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .jets import variables
from .linstab import (
    DegenerateEquilibrium,
    classify,
    integral_constant,
    reduced_equilibrium,
    reduced_rhs,
    jacobian6,
)
from .model import ModelParams

NU = (1, -1, 2, -2, 3, -3)

NEUTRAL_TOL = 1e-6
RESONANCE_TOL = 1e-6
G_FLOOR = 1e-30
MAX_CONDITION = 1e10


def pos(nu):
    """Array position of index ``nu`` in the ``(1, -1, 2, -2, 3, -3)`` layout."""
    return 2 * (abs(nu) - 1) + (0 if nu > 0 else 1)


class NormalFormError(ValueError):
    """The normal form cannot be built at this parameter value."""


class ResonanceError(NormalFormError):
    pass


def unit_params(params):
    return ModelParams(gamma=params.gamma, l=1.0, c0=1.0)


@dataclass
class DiagonalizedSystem:
    """The reduced system written in eigen-coordinates ``x = C (Z - Z*)``.

    ``quad[nu, j, h]`` and ``cubic[nu, j, h, k]`` are symmetric in their
    lower indices and use the ``(1, -1, 2, -2, 3, -3)`` position layout.
    """

    b_star_over_l: float
    gamma: float
    lambdas: np.ndarray
    C: np.ndarray
    Cinv: np.ndarray
    linear: np.ndarray
    quad: np.ndarray
    cubic: np.ndarray
    condition: float
    kappa: float = 0.0
    origin: np.ndarray = field(default=None, repr=False)


@dataclass
class NormalFormResult:
    b_star_over_l: float
    g: np.ndarray | None = None
    max_abs_re_g: float = float("nan")
    neutral: bool = False
    resonant_flag: bool = False
    degenerate: bool = False
    message: str = ""
    min_denominator: float = float("nan")
    alpha: np.ndarray | None = field(default=None, repr=False)

    def g_value(self, h, nu):
        """``g^nu_h`` (coefficient of ``y_nu y_h y_-h`` in the ``nu`` equation)."""
        return self.g[pos(nu), h - 1]

    @property
    def flagged(self):
        return self.resonant_flag or self.degenerate


def normalize_eigenvector(v):
    """Scale so that the largest-magnitude entry equals 1."""
    k = int(np.argmax(np.abs(v)))
    return v / v[k]


def eigenbasis(J, scales=None, min_gap=1e-8):
    """Eigenvalues and eigenvectors in the ``(1, -1, 2, -2, 3, -3)`` layout.

    Positive indices carry the eigenvalues with positive imaginary part in
    order of increasing frequency; the negative index is the exact complex
    conjugate.
    """
    w, V = np.linalg.eig(J)
    up = np.where(w.imag > 0)[0]
    if len(up) != 3:
        raise NormalFormError("spectrum is not three conjugate pairs")
    up = up[np.argsort(w[up].imag)]
    om = w[up].imag
    if np.min(np.diff(om)) < min_gap:
        raise NormalFormError("frequencies are not pairwise distinct")
    lam = np.empty(6, complex)
    basis = np.empty((6, 6), complex)
    for k, i in enumerate(up):
        v = normalize_eigenvector(V[:, i])
        lam[2 * k] = w[i]
        lam[2 * k + 1] = np.conj(w[i])
        basis[:, 2 * k] = v
        basis[:, 2 * k + 1] = np.conj(v)
    return lam, basis


def diagonalize(b_star, params):
    """Eigen-coordinates and symmetrised Taylor coefficients through order three.

    ``b_star`` is in 1/s; the computation itself runs in units ``l = c0 = 1``.
    """
    ratio = b_star / params.l
    up = unit_params(params)
    cls = classify(ratio, up)
    if not cls.neutral:
        raise NormalFormError(f"b*/l = {ratio:.6g} is {cls.tag}, not neutral")
    kappa = integral_constant(ratio, up)
    J = jacobian6(ratio, up)
    lam, V = eigenbasis(J)
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NormalFormError(f"eigenbasis near-degenerate at b*/l = {ratio:.6g} (cond {cond:.3g})")
    Cm = np.linalg.inv(V)
    z0 = reduced_equilibrium(ratio, up).astype(complex)
    f = reduced_rhs(variables(z0, V), kappa, up)
    lin = Cm @ np.array([fi.c1 for fi in f])
    quad = np.einsum("ni,ijh->njh", Cm, np.array([fi.c2 for fi in f]))
    cubic = np.einsum("ni,ijhk->njhk", Cm, np.array([fi.c3 for fi in f]))
    return DiagonalizedSystem(ratio, params.gamma, lam, Cm, V, lin, quad, cubic, cond, kappa, z0)


def alpha_coeffs(sys, resonance_tol=RESONANCE_TOL):
    """Quadratic normalising coefficients ``alpha^nu_lm = a^nu_lm / (l_l + l_m - l_nu)``."""
    lam = sys.lambdas
    den = lam[None, :, None] + lam[None, None, :] - lam[:, None, None]
    small = float(np.min(np.abs(den)))
    if small < resonance_tol:
        raise ResonanceError(f"second-order resonance at b*/l = {sys.b_star_over_l:.6g} (|denominator| = {small:.3g})")
    return sys.quad / den


def _g_from(sys, alpha):
    a = sys.quad
    b = sys.cubic
    g = np.empty((6, 3), complex)
    for nu in NU:
        p, m = pos(nu), pos(-nu)
        for h in (1, 2, 3):
            if h == abs(nu):
                val = 3.0 * b[p, p, p, m] + 2.0 * np.sum(2.0 * a[p, p, :] * alpha[:, p, m] + a[p, m, :] * alpha[:, p, p])
            else:
                hp, hm = pos(h), pos(-h)
                val = 6.0 * b[p, p, hp, hm] + 4.0 * np.sum(
                    a[p, p, :] * alpha[:, hp, hm] + a[p, hp, :] * alpha[:, hm, p] + a[p, hm, :] * alpha[:, p, hp]
                )
            g[p, h - 1] = val
    return g


def g_coeffs(b_star, params, tol=NEUTRAL_TOL, resonance_tol=RESONANCE_TOL):
    """Normal-form coefficients and the neutrality verdict at ``b_star`` (1/s)."""
    ratio = b_star / params.l
    try:
        sys = diagonalize(b_star, params)
    except DegenerateEquilibrium as exc:
        return NormalFormResult(ratio, degenerate=True, message=str(exc))
    lam = sys.lambdas
    den = lam[None, :, None] + lam[None, None, :] - lam[:, None, None]
    mind = float(np.min(np.abs(den)))
    try:
        alpha = alpha_coeffs(sys, resonance_tol)
    except ResonanceError as exc:
        return NormalFormResult(ratio, resonant_flag=True, message=str(exc), min_denominator=mind)
    g = _g_from(sys, alpha)
    scale = max(float(np.max(np.abs(g))), G_FLOOR)
    re = float(np.max(np.abs(g.real))) / scale
    return NormalFormResult(
        ratio,
        g=g,
        max_abs_re_g=re,
        neutral=re < tol,
        min_denominator=mind,
        alpha=alpha,
    )


def neutrality_scan(lo, hi, step, params, tol=NEUTRAL_TOL, resonance_tol=RESONANCE_TOL, workers=1):
    """Normal-form check on the grid ``lo, lo+step, ... <= hi`` (in ``b*/l``).

    Points that are degenerate, resonant, on a boundary or otherwise
    unusable are kept in the output with their flags set.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    if hi < lo:
        return []
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    grid = [lo + i * step for i in range(n)]

    def one(r):
        return _scan_point(r, params, tol, resonance_tol)

    if workers > 1 and n > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            out = list(ex.map(one, grid))
    else:
        out = [one(r) for r in grid]
    out.sort(key=lambda res: res.b_star_over_l)
    return out


def _scan_point(r, params, tol, resonance_tol):
    up = unit_params(params)
    cls = classify(r, up)
    if cls.tag == "Degenerate":
        return NormalFormResult(r, degenerate=True, message="A* = 0")
    if not cls.neutral:
        return NormalFormResult(r, degenerate=True, message=f"{cls.tag}: no neutral spectrum")
    try:
        return g_coeffs(r * params.l, params, tol, resonance_tol)
    except NormalFormError as exc:
        return NormalFormResult(r, degenerate=True, message=str(exc))


def instability_segments(results):
    """Connected runs of grid points with ``neutral == False`` as ``(lo, hi)`` pairs."""
    segs = []
    cur = None
    for res in results:
        if not res.neutral:
            cur = [res.b_star_over_l, res.b_star_over_l] if cur is None else [cur[0], res.b_star_over_l]
        elif cur is not None:
            segs.append(tuple(cur))
            cur = None
    if cur is not None:
        segs.append(tuple(cur))
    return segs


def normalizing_transform_inverse(x, alpha):
    """Second-order inverse of ``x = y + alpha(y, y)``: ``y ~ x - alpha(x, x)``."""
    x = np.asarray(x)
    return x - np.einsum("njh,...j,...h->...n", alpha, x, x)


def action_drift(b_star_over_l, gamma, eps, mode=1, t_end=1000.0, samples=4001, rtol=1e-12):
    """Drift of the normal-form action ``rho = |y_mode|^2`` along the full ODE.

    Starts on ``x = y + alpha(y, y)`` with ``y_mode = y_-mode = eps``, integrates
    in units ``l = c0 = 1`` for ``t_end`` (i.e. ``t_end / l`` seconds), maps
    back with :func:`normalizing_transform_inverse` and returns
    ``max |rho - mean rho|``.  The quadratic terms are removed exactly, so
    the drift is of higher order than the ``eps^3`` size of the raw cubic
    exchange.
    """
    from scipy.integrate import solve_ivp

    from .model import rhs_full

    up = ModelParams(gamma=gamma, l=1.0, c0=1.0)
    sys = diagonalize(b_star_over_l, up)
    alpha = alpha_coeffs(sys)
    y = np.zeros(6, complex)
    y[pos(mode)] = eps
    y[pos(-mode)] = eps
    x = y + np.einsum("njh,j,h->n", alpha, y, y)
    A, B, C, a, c, d = sys.origin.real + (sys.Cinv @ x).real
    D = 4.0 * A * C - B * B
    b = c + 1.0 + sys.kappa * D ** (1.0 / (2.0 * gamma))
    y0 = np.array([a, b, c, d, A, B, C, 0.0])
    te = np.linspace(0.0, t_end, samples)
    sol = solve_ivp(lambda t, u: rhs_full(u, up), (0.0, t_end), y0, method="DOP853", rtol=rtol, atol=rtol * 1e-3, t_eval=te)
    U = sol.y.T
    Z = np.stack([U[:, 4], U[:, 5], U[:, 6], U[:, 0], U[:, 2], U[:, 3]], axis=1) - sys.origin.real
    yt = normalizing_transform_inverse(Z @ sys.C.T, alpha)
    rho = np.abs(yt[:, pos(mode)]) ** 2
    return float(np.max(np.abs(rho - rho.mean())))
