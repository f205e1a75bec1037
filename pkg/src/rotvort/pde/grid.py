"""Uniform cell-centred grid and the field container."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

CFL_FACTOR = 0.5


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid centred on the vortex axis.

    ``dx`` and ``dy`` are in ``length_unit`` metres (1 by default), so the
    scaled units of a reference run can be entered verbatim.  ``dt=None``
    selects the CFL step at run time.
    """

    nx: int = 100
    ny: int = 100
    dx: float = 6400.0
    dy: float | None = None
    dt: float | None = None
    t_end: float = 4.0 * 3600.0
    cfl: float = CFL_FACTOR
    length_unit: float = 1.0

    def __post_init__(self):
        if self.nx < 3 or self.ny < 3:
            raise ValueError("grid needs at least 3 cells per direction")
        if self.dx <= 0 or (self.dy is not None and self.dy <= 0):
            raise ValueError("grid spacing must be positive")
        if self.dt is not None and self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")

    @property
    def hx(self):
        """Spacing in metres along ``x1``."""
        return self.dx * self.length_unit

    @property
    def hy(self):
        return (self.dx if self.dy is None else self.dy) * self.length_unit

    def axes(self):
        x = (np.arange(self.nx) - 0.5 * (self.nx - 1)) * self.hx
        y = (np.arange(self.ny) - 0.5 * (self.ny - 1)) * self.hy
        return x, y

    def mesh(self):
        """Coordinates with ``x1`` along axis 0 and ``x2`` along axis 1."""
        x, y = self.axes()
        return np.meshgrid(x, y, indexing="ij")

    @property
    def cell_area(self):
        return self.hx * self.hy

    def refined(self, factor):
        """Same physical domain with ``factor`` times as many cells per direction."""
        return replace(
            self,
            nx=self.nx * factor,
            ny=self.ny * factor,
            dx=self.dx / factor,
            dy=None if self.dy is None else self.dy / factor,
            dt=None if self.dt is None else self.dt / factor,
        )


@dataclass
class Field2D:
    """``U1``, ``U2`` (m/s) and ``Pi`` on the grid, stacked as ``u[0:3]``."""

    u: np.ndarray
    time: float = 0.0

    @property
    def U1(self):
        return self.u[0]

    @property
    def U2(self):
        return self.u[1]

    @property
    def Pi(self):
        return self.u[2]

    def copy(self):
        return Field2D(self.u.copy(), self.time)

    def is_finite(self):
        return bool(np.all(np.isfinite(self.u)))


def sound_speed(Pi, params):
    """Local linear wave speed ``sqrt(c0 (gamma - 1) Pi)``, zero where ``Pi <= 0``."""
    return np.sqrt(np.maximum(params.c0 * (params.gamma - 1.0) * Pi, 0.0))


def signal_speed(field, params):
    speed = np.hypot(field.U1, field.U2) + sound_speed(field.Pi, params)
    return float(np.max(speed))


def cfl_dt(field, grid, params):
    """Largest step with ``dt (max|U| + c) / min(dx, dy) = cfl``."""
    s = signal_speed(field, params)
    h = min(grid.hx, grid.hy)
    if s <= 0:
        return np.inf
    return grid.cfl * h / s


def cfl_number(field, grid, params, dt):
    return dt * signal_speed(field, params) / min(grid.hx, grid.hy)
