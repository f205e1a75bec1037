"""Resonances among the three linear frequencies of the steady vortex.

A resonance of order ``|k1| + |k2| + |k3|`` is an integer relation
``k1 w1 + k2 w2 + k3 w3 = 0`` among the sorted frequencies
``w1 <= w2 <= w3``.  Roots are searched in the smooth pair frequencies
``(|Im l1|, |Im l3|, |Im l5|)``; crossings of those curves only permute
the sorted labels, so each hit is relabelled at its location.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .linstab import R_MINUS, R_PLUS, closed_form_lambdas

SIGMA_LO = R_MINUS
SIGMA_HI = R_PLUS
RESIDUAL_TOL = 1e-9
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class ResonanceHit:
    """One root of an integer frequency relation.

    ``relation`` refers to the sorted frequencies; ``pair_relation`` to the
    eigenvalue pairs ``(l1,2, l3,4, l5,6)``.  ``gamma_dependent`` is false
    when the pair ``l1,2`` (the only one involving ``gamma``) does not enter.
    """

    b_star_over_l: float
    relation: tuple
    order: int
    gamma_dependent: bool
    pair_relation: tuple
    residual: float
    gamma: float

    @property
    def in_sigma_plus(self):
        """Strictly inside the cyclonic neutral set (roots at 0, 1 and the ends excluded)."""
        r = self.b_star_over_l
        e = MERGE_TOL
        return SIGMA_LO + e < r < -e or 1.0 + e < r < SIGMA_HI - e


def in_sigma_closure(r, slack=1e-12):
    return SIGMA_LO - slack <= r <= SIGMA_HI + slack


def resonance_bn(n, gamma2_family=False, alt_reading=False):
    """Closed-form resonant ``b*/l`` of order ``n`` between the ``l3,4`` and ``l5,6`` frequencies.

    ``(n +- sqrt(n/2) (n + 1)) / (n^2 + 1)``, kept when inside the closure
    of the neutral set; at these values ``w(l5,6) = n w(l3,4)`` for every
    ``gamma``.  ``alt_reading`` puts ``n + 1`` under the root instead.

    ``gamma2_family`` gives the ``gamma = 2`` relation ``w(l1,2) = n w(l3,4)``
    instead, at ``(1 +- sqrt(2n - 1)) / (2n)``; the minus branch only solves
    the squared equation and is kept only where the relation really holds.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if gamma2_family:
        s = np.sqrt(2.0 * n - 1.0)
        ok = []
        for v in ((1.0 + s) / (2.0 * n), (1.0 - s) / (2.0 * n)):
            if in_sigma_closure(v):
                w = pair_frequencies(v, 2.0)
                if abs(w[0] - n * w[1]) < RESIDUAL_TOL * np.max(w):
                    ok.append(float(v))
        return sorted(ok)
    s = np.sqrt(n * (n + 1) / 2.0) if alt_reading else np.sqrt(n / 2.0) * (n + 1)
    vals = [(n + s) / (n * n + 1.0), (n - s) / (n * n + 1.0)]
    return sorted(float(v) for v in vals if in_sigma_closure(v))


def pair_frequencies(r, gamma):
    """``(|Im l1|, |Im l3|, |Im l5|)`` in units of ``l`` for ``b*/l = r``; shape ``(..., 3)``."""
    lam = closed_form_lambdas(np.asarray(r, dtype=float), gamma, 1.0)
    return np.abs(lam[..., 0::2].imag)


def relations(max_order, min_order=2):
    """Integer triples with ``gcd = 1``, ``min_order <= |k|_1 <= max_order``, first nonzero entry positive."""
    out = []
    for k in itertools.product(range(-max_order, max_order + 1), repeat=3):
        order = sum(abs(v) for v in k)
        if order < min_order or order > max_order:
            continue
        if math.gcd(math.gcd(abs(k[0]), abs(k[1])), abs(k[2])) != 1:
            continue
        if next(v for v in k if v != 0) < 0:
            continue
        out.append(k)
    return out


def _normalize(k):
    k = tuple(int(v) for v in k)
    first = next(v for v in k if v != 0)
    return k if first > 0 else tuple(-v for v in k)


def _roots_for(m, x, W, gamma, tol):
    m_arr = np.asarray(m, dtype=float)
    f = W @ m_arr

    def fun(r):
        return float(pair_frequencies(r, gamma) @ m_arr)

    def resid_ok(r):
        w = pair_frequencies(r, gamma)
        return abs(float(w @ m_arr)) < tol * float(np.max(w))

    roots = []
    for i in (0, len(x) - 1):
        if resid_ok(x[i]):
            roots.append(float(x[i]))
    s = np.sign(f)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    for i in idx:
        r = brentq(fun, x[i], x[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        if resid_ok(r):
            roots.append(float(r))
    exact = np.nonzero(f[1:-1] == 0)[0] + 1
    roots.extend(float(x[i]) for i in exact)
    # tangential touches: local minima of |f| without a sign change
    a = np.abs(f)
    scale = np.max(W, axis=1)
    mins = np.nonzero((a[1:-1] <= a[:-2]) & (a[1:-1] <= a[2:]) & (a[1:-1] < 1e-3 * scale[1:-1]))[0] + 1
    for i in mins:
        if s[i - 1] * s[i] < 0 or s[i] * s[i + 1] < 0:
            continue
        res = minimize_scalar(lambda r: abs(fun(r)), bounds=(x[i - 1], x[i + 1]), method="bounded", options={"xatol": 1e-14})
        if resid_ok(res.x):
            roots.append(float(res.x))
    return roots


def resonance_scan(params, max_order=3, grid_step=1e-4, lo=SIGMA_LO, hi=SIGMA_HI, workers=1):
    """Locate all resonances of order ``2..max_order`` on ``[lo, hi]`` (in ``b*/l``).

    Parameters
    ----------
    params : ModelParams
        Only ``gamma`` matters; frequencies scale with ``l``.
    max_order : int
        Largest ``|k1| + |k2| + |k3|``; 2, 3 or 4.
    grid_step : float
        Bracketing grid spacing in ``b*/l``.

    Returns
    -------
    list of ResonanceHit
        Sorted by position, then relation.
    """
    if max_order not in (2, 3, 4):
        raise ValueError("max_order must be 2, 3 or 4")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    gamma = params.gamma
    n = max(int(np.ceil((hi - lo) / grid_step)), 1)
    x = np.linspace(lo, hi, n + 1)
    W = pair_frequencies(x, gamma)
    rels = relations(max_order)

    def one(m):
        return m, _roots_for(m, x, W, gamma, RESIDUAL_TOL)

    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as ex:
            found = list(ex.map(one, rels))
    else:
        found = [one(m) for m in rels]

    hits = []
    for m, roots in found:
        kept = []
        for r in sorted(roots):
            if kept and r - kept[-1] < MERGE_TOL:
                continue
            kept.append(r)
        for r in kept:
            hits.append(_make_hit(r, m, gamma))
    hits.sort(key=lambda h: (h.b_star_over_l, h.relation))
    return hits


def _make_hit(r, m, gamma):
    w = pair_frequencies(r, gamma)
    order = np.argsort(w, kind="stable")
    k = _normalize([m[j] for j in order])
    resid = abs(float(w @ np.asarray(m, dtype=float))) / float(np.max(w))
    return ResonanceHit(
        b_star_over_l=float(r),
        relation=k,
        order=int(sum(abs(v) for v in m)),
        gamma_dependent=m[0] != 0,
        pair_relation=tuple(int(v) for v in m),
        residual=resid,
        gamma=float(gamma),
    )


def hits_near(hits, point, radius):
    return [h for h in hits if abs(h.b_star_over_l - point) < radius]


def write_hits_csv(hits, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["b_star_over_l", "k1", "k2", "k3", "order", "gamma"])
        for h in hits:
            w.writerow([format(h.b_star_over_l, ".17g"), *h.relation, h.order, format(h.gamma, ".17g")])
