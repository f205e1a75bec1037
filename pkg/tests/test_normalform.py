import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from rotvort import normalform
from rotvort.linstab import R_MINUS, R_PLUS
from rotvort.model import ModelParams, rhs_full
from rotvort.normalform import action_drift, alpha_coeffs, diagonalize, g_coeffs, neutrality_scan, pos

UNIT = ModelParams(gamma=9 / 7, l=1.0, c0=1.0)
neutral_r = st.floats(R_MINUS + 0.01, R_PLUS - 0.01).filter(lambda r: min(abs(r), abs(r - 1)) > 0.01)


def measured_frequency_shift(r, mode, eps=1e-3, t_end=300.0):
    """Phase slope of ``y_mode`` minus its linear frequency, per unit action.

    Independent of the g formulas: integrates the full ODE and only uses
    the linear eigenbasis and the quadratic normalizing map.
    """
    s = diagonalize(r, UNIT)
    al = alpha_coeffs(s)
    y = np.zeros(6, complex)
    y[pos(mode)] = y[pos(-mode)] = eps
    x = y + np.einsum("njh,j,h->n", al, y, y)
    A, B, C, a, c, d = s.origin.real + (s.Cinv @ x).real
    b = c + 1 + s.kappa * (4 * A * C - B * B) ** (1 / (2 * UNIT.gamma))
    te = np.linspace(0, t_end, 3001)
    sol = solve_ivp(lambda t, u: rhs_full(u, UNIT), (0, t_end), [a, b, c, d, A, B, C, 0.0], method="DOP853", rtol=1e-12, atol=1e-15, t_eval=te)
    U = sol.y.T
    Z = np.stack([U[:, 4], U[:, 5], U[:, 6], U[:, 0], U[:, 2], U[:, 3]], 1) - s.origin.real
    yt = normalform.normalizing_transform_inverse(Z @ s.C.T, al)
    phase = np.unwrap(np.angle(yt[:, pos(mode)]))
    slope = np.polyfit(te, phase, 1)[0]
    rho = np.mean(np.abs(yt[:, pos(mode)]) ** 2)
    return (slope - s.lambdas[pos(mode)].imag) / rho


def test_frozen_anticyclonic_midpoint_coefficient():
    # oracle: the integration-measured shift below agrees to 2e-5; the value is -4 sqrt 2
    g = g_coeffs(0.5, UNIT).g_value(1, 1)
    assert g.imag == pytest.approx(-4 * np.sqrt(2), rel=1e-12)


@pytest.mark.parametrize("r, mode", [(0.5, 1), (0.5, 2), (1.1, 2), (-0.1, 2)])
def test_g_matches_integration_oracle(r, mode):
    g = g_coeffs(r, UNIT).g_value(mode, mode).imag
    assert measured_frequency_shift(r, mode) == pytest.approx(g, rel=1e-3)


@given(neutral_r, st.floats(1.01, 1.99))
def test_real_parts_vanish_on_neutral_nonresonant_points(r, g):
    res = normalform._scan_point(r, ModelParams(gamma=g, l=1.0, c0=1.0), 1e-6, 1e-6)
    if res.flagged:
        return
    assert res.max_abs_re_g < 1e-9 * np.max(np.abs(res.g))
    assert res.neutral


@given(neutral_r.filter(lambda r: abs(r - 0.5) > 1e-3), st.floats(1.01, 1.99))
def test_mirror_symmetry_of_coefficients(r, g):
    p = ModelParams(gamma=g, l=1.0, c0=1.0)
    a = normalform._scan_point(r, p, 1e-6, 1e-6)
    b = normalform._scan_point(1 - r, p, 1e-6, 1e-6)
    if a.flagged or b.flagged:
        return
    scale = np.max(np.abs(a.g))
    da = np.sort([a.g_value(h, h).imag for h in (1, 2, 3)])
    db = np.sort([b.g_value(h, h).imag for h in (1, 2, 3)])
    np.testing.assert_allclose(da, db, rtol=0, atol=1e-9 * scale)


def test_units_do_not_change_coefficients():
    # g depends on b*/l only once frequencies are measured in units of l
    a = g_coeffs(0.3, UNIT)
    b = g_coeffs(0.3 * 7.3e-5, ModelParams(gamma=9 / 7, l=7.3e-5, c0=0.1))
    np.testing.assert_allclose(a.g, b.g, rtol=1e-9, atol=1e-12)


def test_scan_flags_resonant_and_degenerate_points():
    res = {round(r.b_star_over_l, 6): r for r in neutrality_scan(-0.2, 1.2, 0.01, ModelParams())}
    assert res[-0.2].resonant_flag  # 2 w1 = w2 there
    assert res[0.0].degenerate and res[1.0].degenerate
    interior = [r for r in res.values() if not r.flagged]
    assert len(interior) > 130
    assert all(r.neutral for r in interior)


def test_scan_outside_sigma_marks_unstable():
    res = neutrality_scan(1.3, 1.4, 0.05, ModelParams())
    assert all(r.degenerate and not r.neutral for r in res)
    assert normalform.instability_segments(res) == [(res[0].b_star_over_l, res[-1].b_star_over_l)]


def test_threaded_scan_is_identical():
    p = ModelParams()
    a = neutrality_scan(0.1, 0.4, 0.05, p, workers=1)
    b = neutrality_scan(0.1, 0.4, 0.05, p, workers=3)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.g, y.g)


@pytest.mark.parametrize("r", [-0.1, 1.1])
def test_cubic_drift_scaling(r):
    d1 = action_drift(r, 9 / 7, 1e-3)
    d2 = action_drift(r, 9 / 7, 5e-4)
    assert d1 / d2 <= 100.0
