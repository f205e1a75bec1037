import csv

import numpy as np
import pytest

from rotvort import oracles
from rotvort.integrate import BLOWUP, COMPLETED, integrate, write_trajectory_csv
from rotvort.model import ModelParams, equilibrium


def test_rejects_bad_arguments():
    p = ModelParams()
    with pytest.raises(ValueError):
        integrate("full", np.zeros(8), 0.0, p)
    with pytest.raises(ValueError):
        integrate("full", np.zeros(8), 1.0, p, rel_tol=-1)
    with pytest.raises(ValueError):
        integrate("nope", np.zeros(8), 1.0, p)
    with pytest.raises(ValueError):
        integrate("full", np.full(8, np.nan), 1.0, p)
    with pytest.raises(ValueError, match="t_eval"):
        integrate("full", np.zeros(8), 1.0, p, backend="fortran")


def test_unstable_manifold_blows_up_at_closed_form_time():
    p = ModelParams()
    l = p.l
    a0 = 0.3 * l
    t_star = oracles.unstable_manifold_blowup_time(a0, l)
    traj = integrate("riccati", [a0, 0.5 * l, -0.5 * l, a0], 2 * t_star, p, rel_tol=1e-12)
    assert traj.status == BLOWUP
    assert abs(traj.t_stop - t_star) * l < 1e-6


def test_fortran_backend_agrees_with_solve_ivp():
    p = ModelParams()
    y0 = equilibrium(0.3 * p.l, p).state.as_array()
    y0[0] += 1e-3 * p.l
    ts = np.linspace(0, 20 / p.l, 21)
    a = integrate("full", y0, ts[-1], p, t_eval=ts, rel_tol=1e-11)
    b = integrate("full", y0, ts[-1], p, t_eval=ts, rel_tol=1e-11, backend="fortran")
    assert a.status == b.status == COMPLETED
    np.testing.assert_allclose(a.states[:, :4], b.states[:, :4], rtol=0, atol=1e-8 * p.l)


def test_fortran_backend_reports_blowup():
    p = ModelParams()
    l = p.l
    t_star = oracles.unstable_manifold_blowup_time(0.0, l)
    ts = np.linspace(0, 2 * t_star, 41)
    traj = integrate("riccati", [0.0, 0.5 * l, -0.5 * l, 0.0], ts[-1], p, t_eval=ts, backend="fortran")
    assert traj.status == BLOWUP
    assert traj.t_stop <= ts[ts > t_star][0] + 1e-9


def test_dense_output_optional():
    p = ModelParams()
    traj = integrate("axisym", [0.0, 0.3 * p.l, 1e-9], 1.0 / p.l, p, dense=False)
    with pytest.raises(ValueError):
        traj(0.5 / p.l)


def test_trajectory_csv_layout(tmp_path):
    p = ModelParams()
    y0 = equilibrium(0.3 * p.l, p).state.as_array()
    traj = integrate("full", y0, 1.0 / p.l, p, t_eval=np.linspace(0, 1.0 / p.l, 5))
    path = tmp_path / "t.csv"
    write_trajectory_csv(traj, p, path)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "a", "b", "c", "d", "A", "B", "C", "K", "D", "first_integral"]
    assert len(rows) == 6
    assert float(rows[3][0]) == traj.times[2]
    # 17 significant digits round-trip exactly
    assert float(rows[2][2]) == traj.states[1, 1]
