"""Linear stability of the steady vortex.

The first integral ``b - c - l = kappa * D**(1/(2 gamma))`` removes ``b``;
what is left is a 6-dimensional system in ``Z = (A, B, C, a, c, d)`` whose
linearisation at the equilibrium has the eigenvalues evaluated by
:func:`eigenvalues_closed`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ModelParams

R_MINUS = (1.0 - np.sqrt(2.0)) / 2.0
R_PLUS = (1.0 + np.sqrt(2.0)) / 2.0

UNSTABLE = "Unstable"
NEUTRAL_CYCLONIC = "NeutralCyclonic"
NEUTRAL_ANTICYCLONIC = "NeutralAnticyclonic"
BOUNDARY = "Boundary"
DEGENERATE = "Degenerate"

REDUCED_NAMES = ("A", "B", "C", "a", "c", "d")


class DegenerateEquilibrium(ValueError):
    """The first-integral reduction is singular (``A* = 0``)."""


@dataclass
class Spectrum:
    """Eigenvalues of the reduced linearisation.

    ``lambdas`` follows the pairing ``(l1, l2, l3, l4, l5, l6)`` with
    ``l2 = -l1`` etc.  ``omegas`` are the three frequencies ``|Im|`` sorted
    ascending and ``pairs[k]`` names the pair (0, 1, 2 for ``l1,2``,
    ``l3,4``, ``l5,6``) that ``omegas[k]`` came from.
    """

    lambdas: np.ndarray
    omegas: np.ndarray
    pairs: tuple
    max_real_part: float
    multiple: bool = False


@dataclass
class StabilityClass:
    tag: str
    max_real_part: float
    b_star_over_l: float = float("nan")

    @property
    def neutral(self):
        return self.tag in (NEUTRAL_CYCLONIC, NEUTRAL_ANTICYCLONIC)


def integral_constant(b_star, params):
    """First-integral constant ``kappa`` at the equilibrium."""
    A_star = params.equilibrium_pressure(b_star)
    if A_star == 0:
        raise DegenerateEquilibrium(f"A* = 0 at b*/l = {b_star / params.l:g}")
    return (2.0 * b_star - params.l) / (2.0 * abs(A_star)) ** (1.0 / params.gamma)


def reduced_rhs(z, kappa, params):
    """Right-hand side of the reduced system in ``(A, B, C, a, c, d)``.

    Written with plain arithmetic so that it also accepts :class:`~rotvort.jets.Jet`
    components.
    """
    A, B, C, a, c, d = z
    g = params.gamma
    l = params.l
    c0 = params.c0
    D = 4.0 * A * C - B * B
    b = c + l + kappa * D ** (1.0 / (2.0 * g))
    tr = a + d
    return [
        -2.0 * a * A - c * B - (g - 1.0) * tr * A,
        -2.0 * b * A - 2.0 * c * C - g * tr * B,
        -b * B - 2.0 * d * C - (g - 1.0) * tr * C,
        -a * a - b * c + l * c - 2.0 * c0 * A,
        -c * tr - l * a - c0 * B,
        -d * d - b * c - l * b - 2.0 * c0 * C,
    ]


def reduced_equilibrium(b_star, params):
    A_star = params.equilibrium_pressure(b_star)
    return np.array([A_star, 0.0, A_star, 0.0, -b_star, 0.0])


def jacobian6(b_star, params):
    """Jacobian of :func:`reduced_rhs` at the equilibrium, order ``(A, B, C, a, c, d)``."""
    l = params.l
    g = params.gamma
    c0 = params.c0
    As = params.equilibrium_pressure(b_star)
    if As == 0:
        raise DegenerateEquilibrium(f"reduction singular at b*/l = {b_star / l:g}")
    bs = b_star
    # derivative of b(A, B, C, c) with respect to A and to C
    db = (2.0 * bs - l) / (2.0 * g * As)
    J = np.zeros((6, 6))
    J[0] = [0.0, bs, 0.0, -(g + 1.0) * As, 0.0, -(g - 1.0) * As]
    J[1] = [-2.0 * bs - 2.0 * As * db, 0.0, 2.0 * bs - 2.0 * As * db, 0.0, -4.0 * As, 0.0]
    J[2] = [0.0, -bs, 0.0, -(g - 1.0) * As, 0.0, -(g + 1.0) * As]
    J[3] = [-2.0 * c0 + bs * db, 0.0, bs * db, 0.0, l, 0.0]
    J[4] = [0.0, -c0, 0.0, bs - l, 0.0, bs]
    J[5] = [(bs - l) * db, 0.0, -2.0 * c0 + (bs - l) * db, 0.0, -l, 0.0]
    return J


def jacobian7(b_star, params):
    """Jacobian of the full system (without ``K``), order ``(a, b, c, d, A, B, C)``."""
    l = params.l
    g = params.gamma
    c0 = params.c0
    As = params.equilibrium_pressure(b_star)
    bs = b_star
    J = np.zeros((7, 7))
    J[0] = [0.0, bs, l - bs, 0.0, -2.0 * c0, 0.0, 0.0]
    J[1] = [-bs, 0.0, 0.0, l - bs, 0.0, -c0, 0.0]
    J[2] = [bs - l, 0.0, 0.0, bs, 0.0, -c0, 0.0]
    J[3] = [0.0, bs - l, -bs, 0.0, 0.0, 0.0, -2.0 * c0]
    J[4] = [-(g + 1.0) * As, 0.0, 0.0, -(g - 1.0) * As, 0.0, bs, 0.0]
    J[5] = [0.0, -2.0 * As, -2.0 * As, 0.0, -2.0 * bs, 0.0, 2.0 * bs]
    J[6] = [-(g - 1.0) * As, 0.0, 0.0, -(g + 1.0) * As, 0.0, -bs, 0.0]
    return J


def _scaled_eigvals(J, scales, l):
    S = np.asarray(scales, dtype=float)
    Jh = (J * S[None, :]) / S[:, None] / l
    return np.linalg.eigvals(Jh) * l


def spectrum_numeric(b_star, params):
    """Eigenvalues of :func:`jacobian6`, computed in nondimensional variables."""
    p = params.l**2 / params.c0
    l = params.l
    return _scaled_eigvals(jacobian6(b_star, params), [p, p, p, l, l, l], l)


def spectrum_numeric7(b_star, params):
    p = params.l**2 / params.c0
    l = params.l
    return _scaled_eigvals(jacobian7(b_star, params), [l, l, l, l, p, p, p], l)


def closed_form_lambdas(b_star, gamma, l):
    """The three eigenvalue pairs for scalar or array ``b_star``.

    ``-l(b + l/4) + root`` cancels to ``O(b^4)`` near ``b = 0``; it is
    evaluated as ``-b^4 / (l(b + l/4) + root)``, which is the same number
    because ``root^2 - l^2 (b + l/4)^2 = -b^4``.
    """
    bs = np.asarray(b_star, dtype=complex)
    lam12 = np.sqrt(-(2.0 * (2.0 - gamma) * bs * (bs - l) + l * l))
    root = np.sqrt((bs + l / 2.0) ** 2 * (l * l / 4.0 + bs * l - bs * bs))
    p = l * (bs + l / 4.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        stable = -(bs**4) / (p + root)
    minus = np.where(np.abs(p + root) >= np.abs(p), stable, -p + root)
    lam34 = np.sqrt(2.0) * np.sqrt(minus)
    lam56 = np.sqrt(2.0) * np.sqrt(-p - root)
    return np.stack([lam12, -lam12, lam34, -lam34, lam56, -lam56], axis=-1)


def sorted_frequencies(lambdas):
    """``(omegas, pairs)`` from a ``(..., 6)`` array in the paired layout."""
    lambdas = np.asarray(lambdas)
    w = np.abs(lambdas[..., 0::2].imag)
    order = np.argsort(w, axis=-1, kind="stable")
    return np.take_along_axis(w, order, axis=-1), order


def eigenvalues_closed(b_star, params, cluster_radius=1e-8):
    lam = closed_form_lambdas(float(b_star), params.gamma, params.l)
    omegas, order = sorted_frequencies(lam)
    diffs = np.abs(lam[:, None] - lam[None, :])
    np.fill_diagonal(diffs, np.inf)
    return Spectrum(
        lambdas=lam,
        omegas=omegas,
        pairs=tuple(int(i) for i in order),
        max_real_part=float(np.max(lam.real)),
        multiple=bool(np.min(diffs) < cluster_radius * params.l),
    )


def classify(b_star, params, tol=1e-12, boundary_tol=1e-14, degenerate_tol=0.0):
    """Classify the equilibrium with half-vorticity ``b_star``.

    ``tol`` is the real-part threshold relative to ``l``.  Points within
    ``boundary_tol`` (in ``b*/l``) of an end of the neutral interval are
    tagged ``Boundary``; ``b*/l`` within ``degenerate_tol`` of 0 or 1 is
    ``Degenerate``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    l = params.l
    ratio = b_star / l
    if abs(ratio) <= degenerate_tol or abs(ratio - 1.0) <= degenerate_tol or params.equilibrium_pressure(b_star) == 0:
        re = float(np.max(spectrum_numeric7(b_star, params).real))
        return StabilityClass(DEGENERATE, re, ratio)
    re = eigenvalues_closed(b_star, params).max_real_part
    if abs(ratio - R_MINUS) <= boundary_tol or abs(ratio - R_PLUS) <= boundary_tol:
        return StabilityClass(BOUNDARY, re, ratio)
    if re > tol * l:
        return StabilityClass(UNSTABLE, re, ratio)
    if params.equilibrium_pressure(b_star) > 0:
        return StabilityClass(NEUTRAL_CYCLONIC, re, ratio)
    return StabilityClass(NEUTRAL_ANTICYCLONIC, re, ratio)


def max_real_numeric(b_star, params):
    """Largest real part of the numeric spectrum, falling back to the 7x7 Jacobian."""
    try:
        ev = spectrum_numeric(b_star, params)
    except DegenerateEquilibrium:
        ev = spectrum_numeric7(b_star, params)
    return float(np.max(ev.real))


def boundary_bisect(params, threshold=1e-9, xtol=1e-10):
    """Locate the ends of the neutral interval in ``b*/l`` by bisection.

    The predicate is ``max Re(lambda) > threshold * l`` on the numeric
    spectrum of :func:`jacobian6`.
    """
    l = params.l

    def unstable(r):
        return max_real_numeric(r * l, params) > threshold * l

    def bisect(stable_end, unstable_end):
        if unstable(stable_end) or not unstable(unstable_end):
            raise RuntimeError("bracket does not straddle the stability boundary")
        s, u = stable_end, unstable_end
        while abs(u - s) > xtol:
            m = 0.5 * (s + u)
            if unstable(m):
                u = m
            else:
                s = m
        return 0.5 * (s + u)

    return bisect(-0.1, -0.5), bisect(1.1, 1.5)


def scan(lo, hi, step, params, tol=1e-12):
    """Classify ``b*/l`` on ``lo, lo+step, ..., <= hi``; returns row dicts."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1 if hi >= lo else 0
    rows = []
    for i in range(n):
        r = lo + i * step
        r = round(r, 12)
        cls = classify(r * params.l, params, tol=tol)
        spec = eigenvalues_closed(r * params.l, params)
        rows.append(
            {
                "b_star_over_l": r,
                "gamma": params.gamma,
                "re_max": cls.max_real_part,
                "omega1": spec.omegas[0],
                "omega2": spec.omegas[1],
                "omega3": spec.omegas[2],
                "class": cls.tag,
            }
        )
    return rows

