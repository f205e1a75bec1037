"""Linear-profile vortex model.

A velocity field ``U = Q x`` with ``Q = [[a, b], [c, d]]`` and a transformed
pressure ``Pi = A x1^2 + B x1 x2 + C x2^2 + K`` solve the rotating
compressible Euler system exactly when the eight coefficients obey the ODEs
implemented here.  State vectors are laid out as ``(a, b, c, d, A, B, C, K)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

FULL_NAMES = ("a", "b", "c", "d", "A", "B", "C", "K")
AXISYM_NAMES = ("a", "b", "A")

CYCLONIC = "cyclonic"
ANTICYCLONIC = "anticyclonic"
DEGENERATE = "degenerate"

DEFINED = "defined"
ZERO_PV = "zero-potential-vorticity"
UNDEFINED = "undefined"


class ParameterError(ValueError):
    """Raised for physical parameters outside the supported range."""

    def __init__(self, message, field_path=None):
        super().__init__(message if field_path is None else f"{field_path}: {message}")
        self.field_path = field_path


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the rotating medium.

    Parameters
    ----------
    gamma : float
        Heat ratio, restricted to the open interval (1, 2).
    l : float
        Coriolis parameter in 1/s.
    c0 : float
        Pressure coupling constant ``gamma/(gamma-1) * C**(1/gamma)``.
    """

    gamma: float = 9.0 / 7.0
    l: float = 7.3e-5
    c0: float = 0.1

    def __post_init__(self):
        if not np.isfinite(self.gamma) or not 1.0 < self.gamma < 2.0:
            raise ParameterError(f"gamma must lie in (1, 2), got {self.gamma}", "params.gamma")
        if not np.isfinite(self.l) or self.l <= 0.0:
            raise ParameterError(f"l must be positive, got {self.l}", "params.l")
        if not np.isfinite(self.c0) or self.c0 <= 0.0:
            raise ParameterError(f"c0 must be positive, got {self.c0}", "params.c0")

    def equilibrium_pressure(self, b_star):
        """Curvature ``A*`` of the pressure at the steady vortex core."""
        return b_star * (b_star - self.l) / (2.0 * self.c0)


@dataclass
class FlowState:
    """Coefficients of the linear-profile solution at one instant."""

    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    K: float = 0.0

    def as_array(self):
        return np.array([self.a, self.b, self.c, self.d, self.A, self.B, self.C, self.K], dtype=float)

    @classmethod
    def from_array(cls, y):
        return cls(*(float(v) for v in np.asarray(y, dtype=float)[:8]))

    @property
    def D(self):
        return pressure_discriminant(self.as_array())

    @property
    def D_sign(self):
        return int(np.sign(self.D))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.as_array())))


@dataclass
class AxisymState:
    """Axisymmetric reduction: half-divergence, half-vorticity, pressure curvature."""

    a: float = 0.0
    b: float = 0.0
    A: float = 0.0

    def as_array(self):
        return np.array([self.a, self.b, self.A], dtype=float)

    @classmethod
    def from_array(cls, y):
        y = np.asarray(y, dtype=float)
        return cls(float(y[0]), float(y[1]), float(y[2]))

    def embed(self, K=0.0):
        """The same motion written as a full state (d=a, c=-b, C=A, B=0)."""
        return FlowState(self.a, self.b, -self.b, self.a, self.A, 0.0, self.A, K)


@dataclass
class Equilibrium:
    state: FlowState
    b_star: float
    A_star: float
    kind: str
    params: ModelParams = field(repr=False)


class FirstIntegral(NamedTuple):
    value: float
    tag: str


def pressure_discriminant(y):
    """``D = 4AC - B^2`` for a full state vector (or a stack of them)."""
    y = np.asarray(y, dtype=float)
    return 4.0 * y[..., 4] * y[..., 6] - y[..., 5] ** 2


def _unpack(y, n):
    # plain floats are several times faster for single states in solve_ivp
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        return y.tolist()[:n], True
    return [y[..., i] for i in range(n)], False


def _pack(parts, single):
    return np.array(parts) if single else np.stack(parts, axis=-1)


def rhs_full(y, params):
    """Time derivative of ``(a, b, c, d, A, B, C, K)``.

    Component form of ``Q' + Q^2 + l L Q + 2 c0 R = 0`` and
    ``R' + R Q + Q^T R + (gamma-1) tr(Q) R = 0`` with ``R = [[A, B/2], [B/2, C]]``.
    """
    (a, b, c, d, A, B, C, K), single = _unpack(y, 8)
    g = params.gamma
    l = params.l
    c0 = params.c0
    tr = a + d
    out = [
        -a * a - b * c + l * c - 2.0 * c0 * A,
        -b * tr + l * d - c0 * B,
        -c * tr - l * a - c0 * B,
        -d * d - b * c - l * b - 2.0 * c0 * C,
        -2.0 * a * A - c * B - (g - 1.0) * tr * A,
        -2.0 * b * A - 2.0 * c * C - g * tr * B,
        -b * B - 2.0 * d * C - (g - 1.0) * tr * C,
        -(g - 1.0) * tr * K,
    ]
    return _pack(out, single)


def rhs_axisym(y, params):
    """Time derivative of ``(a, b, A)`` on the axisymmetric submanifold."""
    (a, b, A), single = _unpack(y, 3)
    l = params.l
    return _pack(
        [
            -a * a + b * b - l * b - 2.0 * params.c0 * A,
            -2.0 * a * b + l * a,
            -2.0 * params.gamma * a * A,
        ],
        single,
    )


def rhs_finite_mass(q, G, kappa, params):
    """Finite-mass moment system for ``Q`` and the normalised second moments.

    Returns ``(dq, dG)`` where ``q = (a, b, c, d)`` and ``G = (G1, G2, G3)``.
    Under ``A = G2, B = -2 G3, C = G1, kappa = 2 c0`` this is :func:`rhs_full`
    without the ``K`` equation.
    """
    if kappa < 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")
    a, b, c, d = (np.asarray(q, dtype=float)[..., i] for i in range(4))
    G1, G2, G3 = (np.asarray(G, dtype=float)[..., i] for i in range(3))
    g = params.gamma
    l = params.l
    dq = np.stack(
        [
            -a * a - b * c + l * c - kappa * G2,
            -b * (a + d) + l * d + kappa * G3,
            -c * (a + d) - l * a + kappa * G3,
            -d * d - b * c - l * b - kappa * G1,
        ],
        axis=-1,
    )
    dG = np.stack(
        [
            ((1.0 - g) * a - (1.0 + g) * d) * G1 + 2.0 * b * G3,
            ((1.0 - g) * d - (1.0 + g) * a) * G2 + 2.0 * c * G3,
            c * G1 + b * G2 - g * (a + d) * G3,
        ],
        axis=-1,
    )
    return dq, dG


def full_to_finite_mass(y, params):
    """Map a full state to ``(q, G, kappa)`` of the finite-mass system."""
    y = np.asarray(y, dtype=float)
    q = y[..., :4]
    G = np.stack([y[..., 6], y[..., 4], -0.5 * y[..., 5]], axis=-1)
    return q, G, 2.0 * params.c0


def riccati_rhs(y, l):
    """``Q' = -Q^2 - l L Q`` for ``y = (a, b, c, d)`` (the c0 = 0 velocity system)."""
    (a, b, c, d), single = _unpack(y, 4)
    return _pack(
        [
            -a * a - b * c + l * c,
            -b * (a + d) + l * d,
            -c * (a + d) - l * a,
            -d * d - b * c - l * b,
        ],
        single,
    )


def equilibrium(b_star, params, K=0.0):
    """The steady axisymmetric vortex with half-vorticity ``b_star``."""
    A_star = params.equilibrium_pressure(b_star)
    if A_star > 0:
        kind = CYCLONIC
    elif A_star < 0:
        kind = ANTICYCLONIC
    else:
        kind = DEGENERATE
    state = FlowState(0.0, b_star, -b_star, 0.0, A_star, 0.0, A_star, K)
    return Equilibrium(state, float(b_star), float(A_star), kind, params)


def first_integral_const(y, params, atol=0.0):
    """Constant of ``b - c - l = const * D**(1/(2 gamma))``.

    ``y`` may be a :class:`FlowState` or a full state vector.  ``D <= atol``
    with a vanishing numerator gives the zero-potential-vorticity tag; with a
    nonzero numerator the constant is undefined.
    """
    if isinstance(y, FlowState):
        y = y.as_array()
    y = np.asarray(y, dtype=float)
    num = y[1] - y[2] - params.l
    D = pressure_discriminant(y)
    if D > atol:
        return FirstIntegral(float(num / D ** (1.0 / (2.0 * params.gamma))), DEFINED)
    if abs(num) <= atol:
        return FirstIntegral(0.0, ZERO_PV)
    return FirstIntegral(float("nan"), UNDEFINED)


def first_integral_series(states, params):
    """Vectorised first-integral constant; NaN wherever ``D <= 0``."""
    states = np.asarray(states, dtype=float)
    D = pressure_discriminant(states)
    num = states[..., 1] - states[..., 2] - params.l
    out = np.full(D.shape, np.nan)
    pos = D > 0
    out[pos] = num[pos] / D[pos] ** (1.0 / (2.0 * params.gamma))
    return out


def axisym_integral_const(y, params):
    """``Cst`` in ``b = l/2 + Cst |A|**(1/gamma)`` for an axisymmetric state."""
    if isinstance(y, AxisymState):
        y = y.as_array()
    a, b, A = np.asarray(y, dtype=float)[:3]
    if A == 0:
        return float("nan")
    return float((b - params.l / 2.0) / abs(A) ** (1.0 / params.gamma))
