"""Command-line entry point: ``rotvort <subcommand> [options]``.

Exit status is 0 on success (a blow-up is a reported outcome, not an
error), 1 on a configuration or validation error and 2 on a numerical
failure or a failed check.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from . import acceptance, linstab, normalform, resonance
from .config import ConfigError, load_config
from .integrate import BLOWUP as ODE_BLOWUP
from .integrate import TOLERANCE_FAILURE, integrate, write_trajectory_csv
from .model import AxisymState, ParameterError, equilibrium
from .pde import InadmissibleInitialData
from .pde import run as pde_run

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2


def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _report(msg):
    print(msg, flush=True)


# subcommands ---------------------------------------------------------------


def cmd_integrate(cfg):
    s = cfg["integrate"]
    p = cfg.params
    rng = np.random.default_rng(cfg.seed)
    b_star = s["b_star_over_l"] * p.l
    if s["state0"] is not None:
        y0 = np.array(s["state0"], dtype=float)
    else:
        eq = equilibrium(b_star, p).state
        A_scale = abs(eq.A) if eq.A != 0 else p.l**2 / p.c0
        if s["rhs"] == "full":
            y0 = eq.as_array()
            scale = np.array([p.l] * 4 + [A_scale] * 3 + [0.0])
        elif s["rhs"] == "axisym":
            y0 = np.array([eq.a, eq.b, eq.A])
            scale = np.array([p.l, p.l, A_scale])
        else:
            y0 = eq.as_array()[:4]
            scale = np.full(4, p.l)
        y0 = y0 + s["perturbation"] * scale * rng.standard_normal(len(y0))
    T = s["t_end_over_l"] / p.l
    traj = integrate(
        s["rhs"], y0, T, p, rel_tol=s["rel_tol"], bound_factor=s["bound_factor"], t_eval=np.linspace(0.0, T, s["samples"])
    )
    if s["rhs"] == "axisym":
        traj.states = np.array([AxisymState.from_array(y).embed().as_array() for y in traj.states]).reshape(-1, 8)
    elif s["rhs"] == "riccati":
        traj.states = np.hstack([traj.states, np.zeros((len(traj.states), 4))])
    path = os.path.join(cfg.out, "trajectory.csv")
    write_trajectory_csv(traj, p, path)
    _report(f"integrate: status={traj.status} samples={len(traj.times)} -> {path}")
    if traj.status == ODE_BLOWUP:
        _report(f"integrate: blow-up at t={traj.t_stop:.6g} s")
    return EXIT_NUMERICAL if traj.status == TOLERANCE_FAILURE else EXIT_OK


def cmd_linstab_scan(cfg):
    s = cfg["linstab_scan"]
    rows = linstab.scan(s["lo"], s["hi"], s["step"], cfg.params, tol=s["tol"])
    cols = ["b_star_over_l", "gamma", "re_max", "omega1", "omega2", "omega3", "class"]
    path = os.path.join(cfg.out, "linstab_scan.csv")
    _write_csv(path, cols, ([r[c] for c in cols] for r in rows))
    n_unst = sum(r["class"] == linstab.UNSTABLE for r in rows)
    _report(f"linstab-scan: {len(rows)} points, {n_unst} unstable -> {path}")
    return EXIT_OK


NF_COLUMNS = ["b_star_over_l", "re_g_max"] + [f"im_g_{i}_{h}" for i in (1, 2, 3) for h in (1, 2, 3)] + ["neutral", "resonant", "degenerate"]


def _nf_row(res):
    if res.g is None:
        im = [float("nan")] * 9
    else:
        im = [float(res.g_value(h, i).imag) for i in (1, 2, 3) for h in (1, 2, 3)]
    return [res.b_star_over_l, res.max_abs_re_g, *im, res.neutral, res.resonant_flag, res.degenerate]


def cmd_normalform_scan(cfg):
    s = cfg["normalform_scan"]
    res = normalform.neutrality_scan(s["lo"], s["hi"], s["step"], cfg.params, s["tol"], s["resonance_tol"], workers=cfg.threads)
    path = os.path.join(cfg.out, "normalform_scan.csv")
    _write_csv(path, NF_COLUMNS, (_nf_row(r) for r in res))
    n_neutral = sum(r.neutral for r in res)
    n_flag = sum(r.flagged for r in res)
    _report(f"normalform-scan: {len(res)} points, {n_neutral} neutral, {n_flag} flagged -> {path}")
    return EXIT_OK


def cmd_resonances(cfg):
    s = cfg["resonances"]
    hits = resonance.resonance_scan(cfg.params, s["max_order"], s["grid_step"], s["lo"], s["hi"], workers=cfg.threads)
    path = os.path.join(cfg.out, "resonances.csv")
    resonance.write_hits_csv(hits, path)
    _report(f"resonances: {len(hits)} hits of order <= {s['max_order']} -> {path}")
    return EXIT_OK


def _oracle_rows(checks, trials, seed, params):
    rows = []
    want4 = {"qsol", "riccati", "lyapunov", "unstable_manifold"} & set(checks)
    c4 = acceptance.criterion_4(n=trials, seed=seed, l=params.l) if want4 else None
    for name in checks:
        if name == "qsol":
            rows.append((name, trials, c4.detail["qsol_rel"], 1e-9))
        elif name == "riccati":
            rows.append((name, trials, c4.detail["riccati_rel"], 1e-9))
        elif name == "lyapunov":
            rows.append((name, trials, c4.detail["lyapunov_rel"], 1e-10))
        elif name == "unstable_manifold":
            rows.append((name, 10, c4.detail["blowup_time_err_times_l"], 1e-3))
        elif name == "first_integral":
            c3 = acceptance.criterion_3(n_eq=trials, n_traj=max(trials // 4, 1), seed=seed)
            rows.append((name, max(trials // 4, 1), c3.detail["max_relative_drift"], c3.detail["bound"]))
        elif name == "finite_mass":
            c9 = acceptance.criterion_9(n=trials, seed=seed)
            rows.append((name, trials, c9.detail["max_rel"], 1e-14))
    return [(n, k, err, tol, bool(err < tol)) for n, k, err, tol in rows]


def cmd_oracle_check(cfg):
    s = cfg["oracle_check"]
    rows = _oracle_rows(s["checks"], s["trials"], cfg.seed, cfg.params)
    path = os.path.join(cfg.out, "oracle_check.csv")
    _write_csv(path, ["check", "trials", "max_error", "tolerance", "passed"], rows)
    for name, _, err, tol, ok in rows:
        _report(f"oracle-check {name}: {'PASS' if ok else 'FAIL'} error={err:.3e} tol={tol:.1e}")
    return EXIT_OK if all(r[4] for r in rows) else EXIT_NUMERICAL


def cmd_pde_run(cfg):
    pc = cfg.pde_config()
    if pc.output.csv_path is None:
        pc.output.csv_path = os.path.join(cfg.out, "diagnostics.csv")
    try:
        rep = pde_run(pc)
    except InadmissibleInitialData as exc:
        raise ConfigError(str(exc), "init") from exc
    except ValueError as exc:
        if "domain too small" not in str(exc):
            raise
        raise ConfigError(str(exc), "grid") from exc
    _report(f"pde-run: status={rep.status} t={rep.t_stop:.6g} s steps={rep.steps} -> {pc.output.csv_path}")
    if pc.output.field_path:
        _report(f"pde-run: {len(rep.snapshots)} snapshot(s) -> {pc.output.field_path}")
    last = rep.series[-1] if rep.series else None
    if last is not None and not np.isfinite(last.max_pi) and rep.status != "blowup":
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_acceptance(cfg):
    results = [acceptance.run_criterion(n) for n in cfg["acceptance"]["criteria"]]
    path = os.path.join(cfg.out, "acceptance.csv")
    _write_csv(path, ["criterion", "passed", "elapsed_s", "failed_parts"], ([r.number, r.passed, r.elapsed, ";".join(k for k, v in r.parts.items() if not v)] for r in results))
    for r in results:
        _report(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


COMMANDS = {
    "integrate": cmd_integrate,
    "linstab-scan": cmd_linstab_scan,
    "normalform-scan": cmd_normalform_scan,
    "resonances": cmd_resonances,
    "oracle-check": cmd_oracle_check,
    "pde-run": cmd_pde_run,
    "acceptance": cmd_acceptance,
}

# flag -> (dotted config path, type, subcommands it applies to; None = all)
OVERRIDES = {
    "--gamma": ("params.gamma", float, None),
    "--l": ("params.l", float, None),
    "--c0": ("params.c0", float, None),
    "--b-star-over-l": ("integrate.b_star_over_l", float, ("integrate",)),
    "--rhs": ("integrate.rhs", str, ("integrate",)),
    "--t-end-over-l": ("integrate.t_end_over_l", float, ("integrate",)),
    "--rel-tol": ("integrate.rel_tol", float, ("integrate",)),
    "--samples": ("integrate.samples", int, ("integrate",)),
    "--lo": (None, float, ("linstab-scan", "normalform-scan", "resonances")),
    "--hi": (None, float, ("linstab-scan", "normalform-scan", "resonances")),
    "--step": (None, float, ("linstab-scan", "normalform-scan")),
    "--tol": (None, float, ("linstab-scan", "normalform-scan")),
    "--grid-step": ("resonances.grid_step", float, ("resonances",)),
    "--max-order": ("resonances.max_order", int, ("resonances",)),
    "--trials": ("oracle_check.trials", int, ("oracle-check",)),
    "--check": ("oracle_check.checks", str, ("oracle-check",)),
    "--nx": ("grid.nx", int, ("pde-run",)),
    "--ny": ("grid.ny", int, ("pde-run",)),
    "--dx": ("grid.dx", float, ("pde-run",)),
    "--dt": ("grid.dt", float, ("pde-run",)),
    "--t-end": ("grid.t_end", float, ("pde-run",)),
    "--family": ("init.family", str, ("pde-run",)),
    "--B0": ("init.B0", float, ("pde-run",)),
    "--sigma": ("init.sigma", float, ("pde-run",)),
    "--k": ("init.k", float, ("pde-run",)),
    "--R0": ("init.R0", float, ("pde-run",)),
    "--criterion": ("acceptance.criteria", int, ("acceptance",)),
}

SECTION_OF = {"linstab-scan": "linstab_scan", "normalform-scan": "normalform_scan", "resonances": "resonances"}
REPEATABLE = ("--check", "--criterion")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message, "<arguments>")


def build_parser():
    parser = _Parser(prog="rotvort", description="Linear-profile vortex dynamics in a rotating compressible medium.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--out", help="output directory (default: current directory)")
        sp.add_argument("--threads", type=int, help="worker threads (default: ROTVORT_THREADS or all cores)")
        sp.add_argument("--seed", type=int, help="random seed")
        for flag, (_, typ, only) in OVERRIDES.items():
            if only is None or name in only:
                dest = flag[2:].replace("-", "_")
                if flag in REPEATABLE:
                    sp.add_argument(flag, dest=dest, type=typ, action="append")
                else:
                    sp.add_argument(flag, dest=dest, type=typ)
    return parser


def _overrides(args):
    out = {"seed": args.seed, "threads": args.threads, "out": args.out}
    for flag, (path, _, only) in OVERRIDES.items():
        if only is not None and args.command not in only:
            continue
        value = getattr(args, flag[2:].replace("-", "_"), None)
        if path is None:
            path = f"{SECTION_OF[args.command]}.{flag[2:]}"
        out[path] = value
    return out


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        cfg = load_config(args.config, _overrides(args))
        os.makedirs(cfg.out, exist_ok=True)
        return COMMANDS[args.command](cfg)
    except (ConfigError, ParameterError) as exc:
        print(f"rotvort: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ArithmeticError, np.linalg.LinAlgError, normalform.NormalFormError) as exc:
        print(f"rotvort: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
