"""Finite-difference simulation of localized vortices."""

from .diagnostics import BLOWUP, BOUNDED, Moments, detect_blowup, diagnostics, moment_identity_residuals
from .grid import Field2D, GridSpec, cfl_dt
from .initial import InadmissibleInitialData, InitialData, build_steady, gx1_exponential_gamma2
from .runner import OutputSpec, PdeRunConfig, RunReport, read_snapshots, run
from .scheme import scheme_residual, step

__all__ = [
    "BLOWUP",
    "BOUNDED",
    "Field2D",
    "GridSpec",
    "InadmissibleInitialData",
    "InitialData",
    "Moments",
    "OutputSpec",
    "PdeRunConfig",
    "RunReport",
    "build_steady",
    "cfl_dt",
    "detect_blowup",
    "diagnostics",
    "gx1_exponential_gamma2",
    "moment_identity_residuals",
    "read_snapshots",
    "run",
    "scheme_residual",
    "step",
]
