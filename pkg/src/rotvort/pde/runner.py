"""Driver for a single PDE run: stepping, diagnostics, snapshots."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ..model import ModelParams
from .diagnostics import BLOWUP, BOUNDED, DIAG_COLUMNS, detect_blowup, diagnostics, max_gradient
from .grid import GridSpec, cfl_dt, cfl_number
from .initial import InitialData, build_steady
from .scheme import step

SNAPSHOT_MAGIC = "ROTVORT1"


@dataclass
class OutputSpec:
    snapshot_times: tuple = ()
    csv_path: str | None = None
    field_path: str | None = None


@dataclass
class PdeRunConfig:
    grid: GridSpec = field(default_factory=GridSpec)
    params: ModelParams = field(default_factory=ModelParams)
    init: InitialData = field(default_factory=InitialData)
    output: OutputSpec = field(default_factory=OutputSpec)
    grad_threshold: float = 1e3
    viscosity: float = 0.0


@dataclass
class RunReport:
    status: str
    t_stop: float
    steps: int
    series: list
    snapshots: list
    dt_last: float = float("nan")

    @property
    def bounded(self):
        return self.status == BOUNDED


def write_snapshot(fh, Pi, time):
    """Append one frame: ASCII header ``ROTVORT1 nx ny time`` then ``Pi`` as little-endian f64, rows along ``x2``."""
    nx, ny = Pi.shape
    fh.write(f"{SNAPSHOT_MAGIC} {nx} {ny} {time!r}\n".encode("ascii"))
    fh.write(np.ascontiguousarray(Pi.T, dtype="<f8").tobytes())


def read_snapshots(path):
    """Frames written by :func:`write_snapshot` as ``[(time, Pi), ...]`` with ``Pi[i1, i2]``."""
    frames = []
    with open(path, "rb") as fh:
        while True:
            header = fh.readline()
            if not header:
                break
            magic, nx, ny, t = header.decode("ascii").split()
            if magic != SNAPSHOT_MAGIC:
                raise ValueError(f"bad snapshot header {header!r}")
            nx, ny = int(nx), int(ny)
            data = np.frombuffer(fh.read(8 * nx * ny), dtype="<f8").reshape(ny, nx)
            frames.append((float(t), data.T.copy()))
    return frames


def write_diagnostics_csv(series, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DIAG_COLUMNS)
        for m in series:
            w.writerow([format(float(v), ".17g") for v in m.row()])


def run(config):
    """Advance the configured vortex to ``t_end`` or blow-up.

    Raises
    ------
    InadmissibleInitialData
        If the initial pressure is not positive.
    ValueError
        If a fixed ``dt`` violates the CFL bound at ``t = 0``.
    """
    grid, params, init = config.grid, config.params, config.init
    f = build_steady(init, grid, params)
    if grid.dt is not None and cfl_number(f, grid, params, grid.dt) >= grid.cfl:
        raise ValueError(f"grid.dt = {grid.dt} violates the CFL bound (limit {cfl_dt(f, grid, params):.6g} s)")
    g0 = max_gradient(f.Pi, grid)
    series = [diagnostics(f, grid, params, init.R0)]
    snaps = sorted(t for t in config.output.snapshot_times if 0 <= t <= grid.t_end)
    stops = sorted(set(snaps) | {grid.t_end})
    out = open(config.output.field_path, "wb") if config.output.field_path else None
    written = []
    status = BOUNDED
    nsteps = 0
    dt = float("nan")
    try:
        if snaps and snaps[0] == 0.0 and out is not None:
            write_snapshot(out, f.Pi, 0.0)
            written.append(0.0)
        for target in stops:
            while f.time < target * (1 - 1e-14) and status == BOUNDED:
                dt = grid.dt if grid.dt is not None else cfl_dt(f, grid, params)
                dt = min(dt, target - f.time)
                f = step(f, grid, params, dt, config.viscosity)
                nsteps += 1
                status = detect_blowup(f, grid, g0, config.grad_threshold)
                if f.is_finite():
                    series.append(diagnostics(f, grid, params, init.R0))
            if status != BOUNDED:
                break
            if target in snaps and target > 0 and out is not None:
                write_snapshot(out, f.Pi, f.time)
                written.append(f.time)
    finally:
        if out is not None:
            out.close()
    if config.output.csv_path:
        write_diagnostics_csv(series, config.output.csv_path)
    return RunReport(status, float(f.time), nsteps, series, written, dt)
