import numpy as np
import pytest
from hypothesis import assume, example, given
from hypothesis import strategies as st

from rotvort import oracles
from rotvort.integrate import BLOWUP, COMPLETED, integrate
from rotvort.model import ModelParams

L = 7.3e-5
P = ModelParams(l=L)
entries = st.floats(-2.0, 2.0)


def test_riccati_exact_solves_the_equation():
    z0 = complex(0.3 * L, -0.2 * L)
    t = np.linspace(0, 10 / L, 7)
    z = oracles.riccati_exact(z0, L, t)
    h = 1e-3 / L
    dz = (oracles.riccati_exact(z0, L, t + h) - oracles.riccati_exact(z0, L, t - h)) / (2 * h)
    np.testing.assert_allclose(dz, oracles.riccati_rhs(z, L), rtol=1e-6)


def test_riccati_pole_detected():
    # |i z0 / (l + i z0)| = 1 exactly when Im z0 = l/2
    z0 = complex(0.4 * L, 0.5 * L)
    tp = oracles.riccati_pole_time(z0, L)
    assert tp is not None and tp > 0
    with pytest.raises(oracles.BlowUp):
        oracles.riccati_exact(z0, L, [0.0, 1.01 * tp])
    assert oracles.riccati_pole_time(complex(0.4 * L, 0.3 * L), L) is None


@given(entries, entries, entries, entries)
@example(0.8100286627194442, 0.5, 0.5, 0.8100286627194442)  # det U tangent to zero
def test_q0_exact_matches_integration(a, b, c, d):
    q = np.array([a, b, c, d]) * L
    assume(abs(q[0] * q[3] - q[1] * q[2]) > 1e-3 * L * L)
    tb = oracles.q0_blowup_time(q, L)
    T = 20 / L if tb is None else 0.8 * tb
    assume(T > 0.05 / L)
    ts = np.linspace(0, T, 9)
    exact = oracles.q0_exact(q, L, ts).reshape(-1, 4)
    traj = integrate("riccati", q, T, P, rel_tol=1e-13, abs_tol=1e-17 * L, t_eval=ts)
    assert traj.status == COMPLETED
    scale = np.max(np.abs(exact))
    np.testing.assert_allclose(traj.states, exact, rtol=0, atol=1e-8 * scale)


@given(entries, entries, entries, entries)
def test_blowup_time_agrees_with_integration(a, b, c, d):
    q = np.array([a, b, c, d]) * L
    assume(abs(q[0] * q[3] - q[1] * q[2]) > 1e-2 * L * L)
    tb = oracles.q0_blowup_time(q, L)
    assume(tb is not None and tb < 50 / L)
    traj = integrate("riccati", q, 1.5 * tb, P, rel_tol=1e-12)
    assert traj.status == BLOWUP
    assert abs(traj.t_stop - tb) * L < 1e-3


@given(entries, entries, entries, entries)
def test_exact_basin_condition_is_no_blowup(a, b, c, d):
    q = np.array([a, b, c, d]) * L
    assume(abs(q[0] * q[3] - q[1] * q[2]) > 1e-6 * L * L)
    e = oracles.basin_expression_exact(*q, L)
    assume(abs(e) > 1e-6 * L * L)
    assert oracles.basin_condition_exact(*q, L) == (oracles.q0_blowup_time(q, L) is None)


def test_quartic_basin_inequality_disagrees_somewhere(rng):
    # the quartic polynomial is not equivalent to the exact criterion
    mismatch = 0
    for _ in range(2000):
        q = rng.normal(scale=L, size=4)
        if oracles.basin_condition(*q, L) != oracles.basin_condition_exact(*q, L):
            mismatch += 1
    assert mismatch > 0


def test_flipped_c1_sign_gives_wrong_solution():
    q = np.array([0.2, 0.5, -0.3, -0.1]) * L
    good = oracles.q0_constants(q, L)
    bad = oracles.q0_constants_flipped(q, L)
    assert good.C1 != bad.C1
    # U(0) = Q(0)^-1, so l^2 det U(0) = l^2 / det Q(0)
    expected = L * L / (q[0] * q[3] - q[1] * q[2])
    assert oracles.det_u(good, 0.0) == pytest.approx(expected, rel=1e-12)
    assert oracles.det_u(bad, 0.0) != pytest.approx(expected, rel=1e-3)


@pytest.mark.parametrize("which, q", [(1, [0.1, 1.05, -0.97, -0.08]), (2, [0.1, 0.05, 0.03, -0.08])])
def test_lyapunov_functions_are_conserved(which, q):
    q = np.array(q) * L
    ts = np.linspace(0, 30 / L, 31)
    traj = integrate("riccati", q, ts[-1], P, rel_tol=1e-13, abs_tol=1e-17 * L, t_eval=ts)
    V = [oracles.lyapunov_V(s, L, which) for s in traj.states]
    assert np.ptp(V) / abs(V[0]) < 1e-10


def test_lyapunov_vanishes_at_equilibrium():
    assert oracles.lyapunov_V([0.0, L, -L, 0.0], L, 1) == pytest.approx(0.0, abs=1e-20)


@given(st.floats(-3.0, 3.0))
def test_unstable_manifold_closed_form(a0):
    a0 *= L
    t_star = oracles.unstable_manifold_blowup_time(a0, L)
    t = np.array([0.25, 0.5, 0.75]) * t_star
    traj = integrate("riccati", [a0, 0.5 * L, -0.5 * L, a0], t[-1], P, rel_tol=1e-12, t_eval=np.concatenate([[0], t]))
    np.testing.assert_allclose(traj.states[1:, 0], oracles.unstable_manifold_a(a0, L, t), rtol=1e-8, atol=1e-12 * L)


def test_pressure_matrix_fits_exact_shape_only():
    q = np.array([0.1, 1.05, -0.97, -0.08]) * L
    R0 = np.array([[2e-9, 3e-10], [3e-10, 1e-9]])
    fit = oracles.r0_numeric(q, R0, 9 / 7, L, np.linspace(0, 30 / L, 301))
    assert fit.residual < 1e-8
    assert fit.residual_three_term > 1e-3


def _scan_first_root(consts, samples=10**4):
    # independent oracle: sample one period, then bisect the first sign change
    period = 2 * np.pi / consts.l
    ts = np.linspace(0, period, samples + 1)[1:]
    vals = oracles.det_u(consts, ts)
    start = np.sign(oracles.det_u(consts, 0.0))
    idx = np.flatnonzero(np.sign(vals) != start)
    if not len(idx):
        return None
    lo, hi = (ts[idx[0] - 1] if idx[0] else 0.0), ts[idx[0]]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.sign(oracles.det_u(consts, mid)) == start:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@given(entries, entries, entries, entries)
def test_first_det_root_matches_scan(a, b, c, d):
    q = np.array([[a, b], [c, d]]) * L
    assume(abs(a * d - b * c) > 1e-3)
    consts = oracles.q0_constants(q, L)
    off, s, co = consts.det_terms()
    # tangent roots are invisible to a sign-change scan
    assume(abs(abs(off) - np.hypot(s, co)) > 1e-6)
    exact, scanned = oracles.first_det_root(consts), _scan_first_root(consts)
    assert (exact is None) == (scanned is None)
    if exact is not None:
        assert abs(exact - scanned) < 1e-9 / L
