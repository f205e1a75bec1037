"""Closed-form solutions used as ground truth.

Covers the ``A = 0`` axisymmetric Riccati equation, the ``c0 = 0`` matrix
Riccati equation ``Q' = -Q^2 - l L Q`` (solved through ``U = Q^{-1}``, which
obeys the linear equation ``U' = I + l U L``), its Lyapunov functions, the
no-blow-up condition on initial data and the pressure matrix carried along
the exact velocity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp


class BlowUp(ArithmeticError):
    """The exact solution has a pole before the requested time."""

    def __init__(self, t_blowup):
        super().__init__(f"solution blows up at t = {t_blowup:.17g}")
        self.t_blowup = t_blowup


def _q_entries(q):
    if hasattr(q, "as_array"):
        q = q.as_array()
    q = np.asarray(q, dtype=float).ravel()
    return q[0], q[1], q[2], q[3]


# --- axisymmetric Riccati equation z' = -z^2 + i l z, z = a + i b ---------


def riccati_rhs(z, l):
    return -z * z + 1j * l * z


def riccati_pole_time(z0, l):
    """First ``t > 0`` at which ``z(t)`` is infinite, or ``None``."""
    z0 = complex(z0)
    if z0 == 0:
        return None
    ratio = 1j * z0 / (l + 1j * z0)
    if not np.isclose(abs(ratio), 1.0, rtol=1e-12, atol=0.0):
        return None
    # exp(-i l t) = ratio
    t = (-np.angle(ratio)) % (2.0 * np.pi) / l
    return t if t > 0 else 2.0 * np.pi / l


def riccati_exact(z0, l, t):
    """``z(t) = l z0 / ((l + i z0) exp(-i l t) - i z0)``.

    Raises :class:`BlowUp` if a pole lies in ``(0, t]``.
    """
    z0 = complex(z0)
    t_arr = np.asarray(t, dtype=float)
    tp = riccati_pole_time(z0, l)
    if tp is not None and np.any(t_arr >= tp):
        raise BlowUp(tp)
    return l * z0 / ((l + 1j * z0) * np.exp(-1j * l * t_arr) - 1j * z0)


# --- c0 = 0 matrix Riccati equation --------------------------------------


@dataclass(frozen=True)
class QConstants:
    """Integration constants of ``U(t)`` for given ``Q(0)``."""

    C1: float
    C2: float
    C3: float
    C4: float
    l: float

    def det_terms(self):
        """``(offset, sin coefficient, cos coefficient)`` of ``l^2 det U(t)``."""
        C1, C2, C3, C4, l = self.C1, self.C2, self.C3, self.C4, self.l
        return 1.0 + l * l * (C2 * C4 - C1 * C3), (C2 + C4) * l, (C1 - C3) * l


def q0_constants(q0, l):
    a, b, c, d = _q_entries(q0)
    det = a * d - b * c
    if det == 0:
        raise ZeroDivisionError("det Q(0) must be nonzero")
    return QConstants(-1.0 / l - c / det, a / det, 1.0 / l - b / det, d / det, l)


def q0_constants_flipped(q0, l):
    """The constants with the sign of ``c(0)`` in ``C1`` flipped.

    Kept only to evaluate the quartic no-blow-up inequality against the
    determinant it was derived from; :func:`q0_exact` does not use it.
    """
    a, b, c, d = _q_entries(q0)
    det = a * d - b * c
    return QConstants(-1.0 / l + c / det, a / det, 1.0 / l - b / det, d / det, l)


def det_u(consts, t):
    """``l^2 det U(t) = 1 + l^2 (C2 C4 - C1 C3) + (C2 + C4) l sin lt + (C1 - C3) l cos lt``."""
    off, s, c = consts.det_terms()
    lt = consts.l * np.asarray(t, dtype=float)
    return off + s * np.sin(lt) + c * np.cos(lt)


def first_det_root(consts):
    """Smallest ``t > 0`` with ``det U(t) = 0``, or ``None``."""
    off, s, c = consts.det_terms()
    R = np.hypot(s, c)
    # a tangent (double) root is still a singularity of U; allow for rounding
    if R == 0 or abs(off) > R * (1.0 + 1e-12):
        return None
    # off + R cos(lt - phi) = 0
    phi = np.arctan2(s, c)
    base = np.arccos(np.clip(-off / R, -1.0, 1.0))
    period = 2.0 * np.pi
    cands = []
    for theta in (phi + base, phi - base):
        theta = theta % period
        if theta <= 1e-15:
            theta += period
        cands.append(theta)
    return min(cands) / consts.l


def q0_exact(q0, l, t):
    """Exact ``Q(t)`` for ``Q' = -Q^2 - l L Q``; returns shape ``(..., 2, 2)``.

    Raises :class:`BlowUp` when ``det U`` vanishes in ``(0, max t]``.
    """
    k = q0_constants(q0, l)
    t_arr = np.asarray(t, dtype=float)
    tb = first_det_root(k)
    if tb is not None and np.any(t_arr >= tb):
        raise BlowUp(tb)
    co = np.cos(l * t_arr)
    si = np.sin(l * t_arr)
    C1, C2, C3, C4 = k.C1, k.C2, k.C3, k.C4
    scale = l / det_u(k, t_arr)
    out = np.empty(t_arr.shape + (2, 2))
    out[..., 0, 0] = scale * (C2 * l * co - C1 * l * si)
    out[..., 0, 1] = scale * (1.0 - l * C3 * co + C4 * l * si)
    out[..., 1, 0] = scale * (-1.0 - l * C1 * co - l * C2 * si)
    out[..., 1, 1] = scale * (l * C4 * co + l * C3 * si)
    return out


def q0_blowup_time(q0, l):
    return first_det_root(q0_constants(q0, l))


def unstable_manifold_a(a0, l, t):
    """``a(t)`` for data with ``b = l/2, c = -l/2, a = d``: ``a' = -a^2 - l^2/4``."""
    return 0.5 * l * np.tan(np.arctan(2.0 * a0 / l) - 0.5 * l * np.asarray(t, dtype=float))


def unstable_manifold_blowup_time(a0, l):
    return (2.0 / l) * (np.arctan(2.0 * a0 / l) + 0.5 * np.pi)


# --- Lyapunov functions ---------------------------------------------------


def lyapunov_V(q, l, which=1):
    """Conserved quantity of the ``c0 = 0`` system, zero at an equilibrium.

    ``which=1`` vanishes at ``a = d = 0, b = -c = l``; ``which=2`` is the
    shifted form (``b -> b - l``, ``c -> c + l``) built for the rest state.
    """
    a, b, c, d = _q_entries(q)
    if which == 2:
        b, c = b - l, c + l
        sgn = -1.0
    elif which == 1:
        sgn = 1.0
    else:
        raise ValueError("which must be 1 or 2")
    det = a * d - b * c
    if det == 0:
        raise ZeroDivisionError("V is singular where ad = bc")
    return (a * a + d * d + (b - sgn * det / l) ** 2 + (c + sgn * det / l) ** 2) / det**2


# --- no-blow-up condition -------------------------------------------------


def basin_expression(a0, b0, c0, d0, l):
    """Left-hand side of the quartic no-blow-up inequality; not equivalent to the exact one."""
    return (
        -((a0 * d0 + b0 * c0) ** 2) * l * l
        + 2.0 * (b0 + c0) * (a0 * a0 * d0 * d0 - b0 * b0 * c0 * c0) * l
        + ((a0 - d0) ** 2 - 4.0 * b0 * c0) * (a0 * d0 - b0 * c0) ** 2
    )


def basin_condition(a0, b0, c0, d0, l):
    """The quartic inequality ``basin_expression(...) < 0``; see :func:`basin_condition_exact`."""
    return bool(basin_expression(a0, b0, c0, d0, l) < 0)


def basin_expression_exact(a0, b0, c0, d0, l):
    """``(a-d)^2 + (b+c)^2 - (b-c-l)^2``; negative iff ``det U`` never vanishes."""
    return (a0 - d0) ** 2 + (b0 + c0) ** 2 - (b0 - c0 - l) ** 2


def basin_condition_exact(a0, b0, c0, d0, l):
    return bool(basin_expression_exact(a0, b0, c0, d0, l) < 0)


# --- pressure matrix along the exact velocity -------------------------------


@dataclass
class R0Fit:
    """Integrated pressure matrix and the two trigonometric fits.

    ``coeffs`` belongs to the exact shape ``R |det U|^(gamma+1) = sum_k
    (A_k cos k lt + B_k sin k lt)``, ``k <= 2``; ``coeffs_three_term`` to the
    three-term shape ``R |det U|^gamma = A0 + A1 sin lt + A2 cos lt``.
    Residuals are maximum misfits relative to ``max |R|``.
    """

    times: np.ndarray
    R: np.ndarray
    coeffs: np.ndarray
    residual: float
    coeffs_three_term: np.ndarray
    residual_three_term: float


def r0_rhs(R, Q, gamma):
    return -(R @ Q + Q.T @ R) - (gamma - 1.0) * np.trace(Q) * R


def _trig_fit(times, l, R, weight, harmonics):
    cols = [np.ones_like(times)]
    for k in range(1, harmonics + 1):
        cols += [np.sin(k * l * times), np.cos(k * l * times)]
    basis = np.stack(cols, axis=1)
    target = (R * weight[:, None, None]).reshape(len(times), 4)
    coef, *_ = np.linalg.lstsq(basis, target, rcond=None)
    fitted = (basis @ coef) / weight[:, None]
    big = max(float(np.max(np.abs(R))), np.finfo(float).tiny)
    return coef.reshape(-1, 2, 2), float(np.max(np.abs(fitted - R.reshape(len(times), 4)))) / big


def r0_numeric(q0, R0, gamma, l, times, rtol=1e-12):
    """Integrate ``R' + R Q + Q^T R + (gamma - 1) tr Q R = 0`` along :func:`q0_exact`.

    With ``Q = U^{-1}`` the solution is ``det U^{1-gamma} Q^T M(t) Q`` where
    ``M`` is ``M(0)`` conjugated by a rotation through ``lt``; the numerator
    of ``R`` over ``det U^{gamma+1}`` therefore carries harmonics up to
    ``2 lt``.  Both this shape and the three-term one are fitted.

    Raises :class:`BlowUp` if ``det U`` vanishes before ``max(times)``.
    """
    times = np.asarray(times, dtype=float)
    R0 = np.asarray(R0, dtype=float)
    k = q0_constants(q0, l)
    tb = first_det_root(k)
    if tb is not None and times.max() >= tb:
        raise BlowUp(tb)

    def f(t, y):
        return r0_rhs(y.reshape(2, 2), q0_exact(q0, l, t), gamma).ravel()

    scale = max(float(np.max(np.abs(R0))), np.finfo(float).tiny)
    sol = solve_ivp(f, (0.0, times.max()), R0.ravel(), method="DOP853", t_eval=times, rtol=rtol, atol=rtol * scale * 1e-3)
    R = sol.y.T.reshape(-1, 2, 2)
    dd = np.abs(det_u(k, times))
    coef, resid = _trig_fit(times, l, R, dd ** (gamma + 1.0), 2)
    coef_p, resid_p = _trig_fit(times, l, R, dd**gamma, 1)
    return R0Fit(times, R, coef, resid, coef_p, resid_p)
