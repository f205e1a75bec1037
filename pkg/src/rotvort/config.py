"""Strict JSON configuration for the command-line tool.

Every section is optional.  Unknown keys are rejected and every error
names the offending field as a dotted path (``grid.nx``,
``params.gamma``).
"""

from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, field

from .model import ModelParams, ParameterError
from .pde import GridSpec, InitialData, OutputSpec, PdeRunConfig
from .pde.initial import EXPONENTIAL, POWERLAW


class ConfigError(ValueError):
    """Malformed or out-of-range configuration, tagged with a field path."""

    def __init__(self, message, field_path=None):
        super().__init__(message if field_path is None else f"{field_path}: {message}")
        self.field_path = field_path


# key -> (kind, default); kinds: float, int, str, bool, floats (list), ints, [choices]
SECTIONS = {
    "params": {"gamma": ("float", 9.0 / 7.0), "l": ("float", 7.3e-5), "c0": ("float", 0.1)},
    "integrate": {
        "rhs": (("full", "axisym", "riccati"), "full"),
        "b_star_over_l": ("float", 0.5),
        "perturbation": ("float", 1e-2),
        "state0": ("floats", None),
        "t_end_over_l": ("float", 100.0),
        "samples": ("int", 1001),
        "rel_tol": ("float", 1e-10),
        "bound_factor": ("float", 1e12),
    },
    "linstab_scan": {"lo": ("float", -0.5), "hi": ("float", 1.5), "step": ("float", 0.01), "tol": ("float", 1e-12)},
    "normalform_scan": {
        "lo": ("float", -0.2),
        "hi": ("float", 1.2),
        "step": ("float", 0.01),
        "tol": ("float", 1e-6),
        "resonance_tol": ("float", 1e-6),
    },
    "resonances": {
        "max_order": ("int", 3),
        "grid_step": ("float", 1e-4),
        "lo": ("float", -0.20710678118654757),
        "hi": ("float", 1.2071067811865475),
    },
    "oracle_check": {
        "checks": ("strs", ["qsol", "riccati", "lyapunov", "unstable_manifold", "first_integral", "finite_mass"]),
        "trials": ("int", 20),
    },
    "grid": {
        "nx": ("int", 100),
        "ny": ("int", 100),
        "dx": ("float", 6400.0),
        "dy": ("float", None),
        "dt": ("float", 10.0),
        "t_end": ("float", 3600.0),
        "cfl": ("float", 0.5),
        "length_unit": ("float", 1.0),
    },
    "init": {
        "family": ((EXPONENTIAL, POWERLAW), EXPONENTIAL),
        "B0": ("float", -1000.0),
        "sigma": ("float", 1e-9),
        "q": ("float", None),
        "k": ("float", 1.0),
        "R0": ("float", 10.0),
    },
    "output": {"snapshot_times": ("floats", []), "csv_path": ("str", None), "field_path": ("str", None)},
    "pde": {"viscosity": ("float", 0.0), "grad_threshold": ("float", 1e3)},
    # criterion 8 alone takes about a minute, so it is opt-in
    "acceptance": {"criteria": ("ints", [1, 2, 3, 4, 5, 6, 7, 9])},
}
GLOBALS = {"seed": ("int", 0), "threads": ("int", None), "out": ("str", ".")}

ORACLE_CHECKS = ("qsol", "riccati", "lyapunov", "unstable_manifold", "first_integral", "finite_mass")


def _coerce(value, kind, path):
    if value is None:
        return None
    if isinstance(kind, tuple):
        if value not in kind:
            raise ConfigError(f"must be one of {list(kind)}, got {value!r}", path)
        return value
    if kind == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", path)
        if not math.isfinite(value):
            raise ConfigError("must be finite", path)
        return float(value)
    if kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", path)
        return value
    if kind == "str":
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", path)
        return value
    if kind in ("floats", "ints", "strs"):
        if not isinstance(value, list):
            raise ConfigError(f"expected a list, got {value!r}", path)
        return [_coerce(v, kind[:-1], f"{path}[{i}]") for i, v in enumerate(value)]
    raise AssertionError(kind)


@dataclass
class RunConfig:
    """Validated configuration: one dict per section plus the globals."""

    sections: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    out: str = "."

    def __getitem__(self, name):
        return self.sections[name]

    @property
    def params(self):
        return self.sections["_params"]

    def pde_config(self):
        g, i, o, p = self["grid"], self["init"], self["output"], self["pde"]
        try:
            grid = GridSpec(**g)
            init = InitialData(**i)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), "grid" if "grid" in str(exc) else "init") from exc
        out = OutputSpec(
            tuple(o["snapshot_times"]),
            _resolve(o["csv_path"], self.out),
            _resolve(o["field_path"], self.out),
        )
        return PdeRunConfig(grid, self.params, init, out, p["grad_threshold"], p["viscosity"])


def _resolve(path, out_dir):
    if path is None or os.path.isabs(path):
        return path
    return os.path.join(out_dir, path)


def default_threads():
    env = os.environ.get("ROTVORT_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"not an integer: {env!r}", "ROTVORT_THREADS") from exc
        if n < 1:
            raise ConfigError("must be at least 1", "ROTVORT_THREADS")
        return n
    return os.cpu_count() or 1


def parse_config(doc=None, overrides=None):
    """Validate a config document (dict, JSON text or ``None``) and apply overrides.

    ``overrides`` maps dotted paths (``"params.gamma"``, ``"seed"``) to
    values; ``None`` values are ignored.
    """
    if doc is None:
        doc = {}
    elif isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON: {exc.msg} at line {exc.lineno} column {exc.colno}", "<config>") from exc
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a JSON object", "<config>")
    doc = json.loads(json.dumps(doc))
    for path, value in (overrides or {}).items():
        if value is None:
            continue
        head, _, tail = path.partition(".")
        if tail:
            sect = doc.setdefault(head, {})
            if not isinstance(sect, dict):
                raise ConfigError("expected an object", head)
            sect[tail] = value
        else:
            doc[head] = value

    unknown = sorted(set(doc) - set(SECTIONS) - set(GLOBALS))
    if unknown:
        raise ConfigError("unknown key", unknown[0])
    sections = {}
    for name, schema in SECTIONS.items():
        raw = doc.get(name, {})
        if not isinstance(raw, dict):
            raise ConfigError("expected an object", name)
        bad = sorted(set(raw) - set(schema))
        if bad:
            raise ConfigError("unknown key", f"{name}.{bad[0]}")
        sections[name] = {k: _coerce(raw[k], kind, f"{name}.{k}") if k in raw else copy.deepcopy(d) for k, (kind, d) in schema.items()}
    glob = {k: _coerce(doc[k], kind, k) if k in doc else default for k, (kind, default) in GLOBALS.items()}

    try:
        sections["_params"] = ModelParams(**sections["params"])
    except ParameterError as exc:
        raise ConfigError(str(exc).split(": ", 1)[-1], exc.field_path) from exc
    _check_ranges(sections)
    threads = glob["threads"] if glob["threads"] is not None else default_threads()
    if threads < 1:
        raise ConfigError("must be at least 1", "threads")
    return RunConfig(sections, glob["seed"], threads, glob["out"])


def _positive(sections, path):
    name, key = path.split(".")
    v = sections[name][key]
    if v is not None and not v > 0:
        raise ConfigError(f"must be positive, got {v}", path)


def _check_ranges(s):
    for path in (
        "integrate.t_end_over_l",
        "integrate.rel_tol",
        "integrate.samples",
        "linstab_scan.step",
        "normalform_scan.step",
        "normalform_scan.tol",
        "resonances.grid_step",
        "oracle_check.trials",
        "grid.nx",
        "grid.ny",
        "grid.dx",
        "grid.dy",
        "grid.dt",
        "grid.cfl",
        "grid.length_unit",
        "init.sigma",
        "init.k",
        "init.R0",
        "pde.grad_threshold",
    ):
        _positive(s, path)
    if s["integrate"]["samples"] < 2:
        raise ConfigError("need at least 2 samples", "integrate.samples")
    if s["grid"]["t_end"] < 0:
        raise ConfigError("must be non-negative", "grid.t_end")
    if s["pde"]["viscosity"] < 0:
        raise ConfigError("must be non-negative", "pde.viscosity")
    if s["resonances"]["max_order"] not in (2, 3, 4):
        raise ConfigError("must be 2, 3 or 4", "resonances.max_order")
    st = s["integrate"]["state0"]
    if st is not None and len(st) != {"full": 8, "axisym": 3, "riccati": 4}[s["integrate"]["rhs"]]:
        raise ConfigError(f"wrong length {len(st)} for rhs {s['integrate']['rhs']!r}", "integrate.state0")
    for i, c in enumerate(s["oracle_check"]["checks"]):
        if c not in ORACLE_CHECKS:
            raise ConfigError(f"unknown check {c!r}; choose from {list(ORACLE_CHECKS)}", f"oracle_check.checks[{i}]")
    for i, n in enumerate(s["acceptance"]["criteria"]):
        if not 1 <= n <= 9:
            raise ConfigError("criteria are numbered 1 to 9", f"acceptance.criteria[{i}]")
    for i, t in enumerate(s["output"]["snapshot_times"]):
        if t < 0:
            raise ConfigError("must be non-negative", f"output.snapshot_times[{i}]")


def load_config(path=None, overrides=None):
    if path is None:
        return parse_config(None, overrides)
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", str(path)) from exc
    return parse_config(text, overrides)
