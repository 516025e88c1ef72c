"""Command-line front end: simulate | sweep | converge | compare.

Exit codes: 0 success, 2 configuration error, 3 simulation error, 4 oracle
mismatch.  Output is CSV (RFC-4180-style, full double precision through
shortest round-trip formatting) or JSON with the same fields; identical
configurations produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analysis
from .config import PRESETS, ExperimentConfig, build_config
from .errors import (
    ConfigError,
    LeakageError,
    ProfileDomainError,
    SingularCompositionError,
    TableRangeError,
)
from .evolution import FockState, Trajectory, apply_to_state, auto_converge, evolve
from .oracle import fidelity, integrate
from .profiles import discretize

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3
EXIT_ORACLE = 4

ORACLE_FIDELITY_MIN = 0.999
NORM_DEFECT_MAX = 1e-10

BASE_COLUMNS = ("t", "omega", "re_alpha", "im_alpha", "abs_alpha",
                "r", "vartheta", "phi", "variance", "mean_n", "norm_defect")

_CONFIG_KEYS = ("profile", "omega0", "B", "epsilon", "omega_l", "omega1",
                "hold_low", "hold_high", "table", "t_final", "n_steps", "tol",
                "n_start", "lam", "scaling", "record_every", "rule", "output",
                "format", "oracle_check", "oracle_dim", "oracle_dt_sub", "fingerprint")


# ---------------------------------------------------------------------------
# table assembly and writers
# ---------------------------------------------------------------------------

def trajectory_table(traj: Trajectory, fingerprint: bool = False):
    """Rows in the fixed column order (plus re_z/im_z when fingerprinting)."""
    columns = list(BASE_COLUMNS)
    if fingerprint:
        columns += ["re_z", "im_z"]
    rows = []
    for rec in traj.records:
        row = [rec.t, rec.omega, rec.alpha.real, rec.alpha.imag, abs(rec.alpha),
               rec.r, rec.vartheta, rec.phi, rec.variance, rec.mean_n, rec.norm_defect]
        if fingerprint:
            row += [rec.r * math.cos(rec.phi), rec.r * math.sin(rec.phi)]
        rows.append(row)
    return columns, rows


def write_table(path: str, fmt: str, columns, rows, comments=(), extra: dict | None = None):
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            for line in comments:
                fh.write(f"# {line}\r\n")
            writer = csv.writer(fh)
            writer.writerow(columns)
            writer.writerows(rows)
    else:
        records = [dict(zip(columns, row)) for row in rows]
        payload = records if extra is None else {**extra, "records": records}
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
            fh.write("\n")


# ---------------------------------------------------------------------------
# shared pipeline pieces
# ---------------------------------------------------------------------------

def run_trajectory(cfg: ExperimentConfig) -> Trajectory:
    profile = cfg.to_profile()
    if cfg.n_steps == "auto":
        return auto_converge(profile, cfg.t_final, cfg.tol, n_start=cfg.n_start,
                             rule=cfg.rule, lam=cfg.lam, scaling=cfg.scaling)
    record_every = cfg.record_every
    if record_every == "auto":
        record_every = max(1, cfg.n_steps // 5000)
    dprof = discretize(profile, cfg.t_final, cfg.n_steps, rule=cfg.rule)
    return evolve(dprof, record_every=record_every, lam=cfg.lam, scaling=cfg.scaling)


def _oracle_check(cfg: ExperimentConfig, traj: Trajectory):
    """Cross-check the final algebraic state against the RK4 integrator."""
    profile = cfg.to_profile()
    dprof = discretize(profile, cfg.t_final, traj.n_steps_used, rule=cfg.rule)
    dt_sub = cfg.oracle_dt_sub if cfg.oracle_dt_sub is not None else dprof.tau / 4.0
    try:
        oracle_state, diag = integrate(dprof, FockState.vacuum(), dt_sub, dim=cfg.oracle_dim)
        method_state = apply_to_state(traj.final, FockState.vacuum(), n_max=diag.dim - 1)
    except LeakageError as exc:
        return EXIT_ORACLE, f"oracle check failed: {exc}"
    fid = fidelity(method_state.normalized(), oracle_state)
    if fid < ORACLE_FIDELITY_MIN:
        return EXIT_ORACLE, (f"oracle mismatch: fidelity {fid:.8f} < {ORACLE_FIDELITY_MIN} "
                             f"(dim={diag.dim}, leakage={diag.leakage:.2e})")
    return EXIT_OK, f"oracle check passed: fidelity {fid:.8f} (dim={diag.dim})"


def run_single(cfg: ExperimentConfig, announce=print) -> int:
    traj = run_trajectory(cfg)
    columns, rows = trajectory_table(traj, fingerprint=cfg.fingerprint)
    write_table(cfg.output, cfg.format, columns, rows)
    announce(f"wrote {cfg.output} ({len(rows)} records, n_steps={traj.n_steps_used})")
    worst = max(rec.norm_defect for rec in traj.records)
    if worst > NORM_DEFECT_MAX:
        print(f"error: norm defect {worst:.3e} exceeds {NORM_DEFECT_MAX:g}", file=sys.stderr)
        return EXIT_SIMULATION
    if cfg.oracle_check:
        code, message = _oracle_check(cfg, traj)
        announce(message)
        if code != EXIT_OK:
            return code
    return EXIT_OK


def _overrides(args: argparse.Namespace, suffix: str = "") -> dict:
    out = {}
    for key in _CONFIG_KEYS:
        value = getattr(args, key + suffix, None)
        if value is not None:
            out[key] = value
    return out


def _config(args: argparse.Namespace) -> ExperimentConfig:
    return build_config(preset=args.preset, config_file=args.config, overrides=_overrides(args))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    return run_single(_config(args))


def cmd_sweep(args) -> int:
    tokens = [tok.strip() for tok in args.sweep_values.split(",") if tok.strip()]
    if not tokens:
        raise ConfigError("--sweep-values is empty")
    try:
        values = [float(tok) for tok in tokens]
    except ValueError as exc:
        raise ConfigError(f"bad sweep value: {exc}") from exc

    base = _overrides(args)
    jobs = []
    for token, value in zip(tokens, values):
        overrides = dict(base)
        overrides[args.sweep_param] = value
        cfg = build_config(preset=args.preset, config_file=args.config, overrides=overrides)
        stem, ext = os.path.splitext(cfg.output)
        cfg.output = f"{stem}_{args.sweep_param}{token}{ext}"
        jobs.append((token, cfg))

    workers = args.workers if args.workers else min(4, len(jobs))
    messages: dict[str, list] = {token: [] for token, _ in jobs}

    def run(job):
        token, cfg = job
        return token, run_single(cfg, announce=messages[token].append)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = dict(pool.map(run, jobs))

    code = EXIT_OK
    for token, _ in jobs:
        for line in messages[token]:
            print(f"[{args.sweep_param}={token}] {line}")
        if results[token] != EXIT_OK and code == EXIT_OK:
            code = results[token]
    return code


def cmd_converge(args) -> int:
    cfg = _config(args)
    profile = cfg.to_profile()
    n_start = cfg.n_steps if isinstance(cfg.n_steps, int) else cfg.n_start
    traj = auto_converge(profile, cfg.t_final, cfg.tol, n_start=n_start,
                         rule=cfg.rule, lam=cfg.lam, scaling=cfg.scaling)
    report_lines = [f"converge N={n} max_dr={diff!r}" for n, diff in traj.convergence_history]
    report_lines.append(f"converged={str(traj.converged).lower()} n_final={traj.n_steps_used} tol={cfg.tol!r}")
    for line in report_lines:
        print(line)
    columns, rows = trajectory_table(traj, fingerprint=cfg.fingerprint)
    extra = {"report": {
        "history": [[n, diff] for n, diff in traj.convergence_history],
        "converged": traj.converged,
        "n_final": traj.n_steps_used,
        "tol": cfg.tol,
    }}
    write_table(cfg.output, cfg.format, columns, rows,
                comments=report_lines, extra=extra)
    print(f"wrote {cfg.output} ({len(rows)} records)")
    return EXIT_OK


def _compare_config(args, suffix: str) -> ExperimentConfig:
    preset = getattr(args, f"preset_{suffix}")
    config_file = getattr(args, f"config_{suffix}")
    return build_config(preset=preset, config_file=config_file, overrides=_overrides(args))


def cmd_compare(args) -> int:
    cfg_a = _compare_config(args, "a")
    cfg_b = _compare_config(args, "b")
    if cfg_a.t_final != cfg_b.t_final:
        raise ConfigError(f"t_final differs: {cfg_a.t_final} vs {cfg_b.t_final}")
    traj_a = run_trajectory(cfg_a)
    traj_b = run_trajectory(cfg_b)
    t_a, t_b = traj_a.times(), traj_b.times()
    if t_a.shape != t_b.shape or not np.array_equal(t_a, t_b):
        raise ConfigError("record grids differ; match n_steps and record_every")
    r_a, r_b = traj_a.r_values(), traj_b.r_values()
    verdict = _compare_verdict(cfg_a, cfg_b, t_a, r_a, r_b)

    out = args.output or "compare.csv"
    fmt = args.format or "csv"
    columns = ["t", "r_a", "r_b", "r_diff"]
    rows = [[float(t_a[i]), float(r_a[i]), float(r_b[i]), float(r_a[i] - r_b[i])]
            for i in range(t_a.shape[0])]
    write_table(out, fmt, columns, rows,
                comments=[f"verdict: {verdict}"], extra={"verdict": verdict})
    print(f"verdict: {verdict}")
    print(f"wrote {out} ({len(rows)} records)")
    return EXIT_OK


def _compare_verdict(cfg_a, cfg_b, times, r_a, r_b) -> str:
    if np.array_equal(r_a, r_b):
        return "identical"
    period_a = analysis.modulation_period(cfg_a.to_profile())
    period_b = analysis.modulation_period(cfg_b.to_profile())
    transient = max(period_a or 0.0, period_b or 0.0) or times[-1] / 10.0
    bar_a = analysis.trailing_mean(times, r_a, period_a or 0.0)
    bar_b = analysis.trailing_mean(times, r_b, period_b or 0.0)
    mask = times > transient
    if not np.any(mask):
        return "window too short for a verdict"
    da = bar_a[mask] - bar_b[mask]
    if np.all(da >= 0.0):
        return "A dominates after transient"
    if np.all(da <= 0.0):
        return "B dominates after transient"
    late = times >= 0.75 * times[-1]
    dl = bar_a[late] - bar_b[late]
    if np.all(dl > 0.0):
        return "A dominates at late times"
    if np.all(dl < 0.0):
        return "B dominates at late times"
    return "mixed ordering after transient"


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _int_or_auto(text: str):
    return text if text == "auto" else int(text)


def _add_config_flags(parser: argparse.ArgumentParser):
    grp = parser.add_argument_group("experiment configuration")
    grp.add_argument("--config", help="flat key = value configuration file")
    grp.add_argument("--profile", choices=("constant", "relaxing_pulse", "parametric_resonance",
                                           "janszky_adam", "sudden_jump", "tabulated"))
    grp.add_argument("--omega0", type=float, help="reference frequency (default 1.0)")
    grp.add_argument("--B", type=float, help="relaxing-pulse width parameter")
    grp.add_argument("--epsilon", type=float, help="modulation rate in units of omega0")
    grp.add_argument("--omega-l", type=float, dest="omega_l", help="extreme frequency of the cosine modulation")
    grp.add_argument("--omega1", type=float, help="second frequency of jump/square-wave profiles")
    grp.add_argument("--hold-low", type=float, dest="hold_low", help="square-wave dwell at omega0")
    grp.add_argument("--hold-high", type=float, dest="hold_high", help="square-wave dwell at omega1")
    grp.add_argument("--table", help="two-column (t, omega) file for tabulated profiles")
    grp.add_argument("--t-final", type=float, dest="t_final")
    grp.add_argument("--n-steps", type=_int_or_auto, dest="n_steps", metavar="N|auto")
    grp.add_argument("--tol", type=float, help="convergence tolerance used with --n-steps auto")
    grp.add_argument("--n-start", type=int, dest="n_start", help="starting N for step doubling")
    grp.add_argument("--lambda", type=float, dest="lam", help="quadrature angle (default 0)")
    grp.add_argument("--scaling", choices=("half", "quarter"))
    grp.add_argument("--record-every", type=_int_or_auto, dest="record_every", metavar="K|auto")
    grp.add_argument("--rule", choices=("right", "midpoint"), help="ladder sampling rule")
    grp.add_argument("--output")
    grp.add_argument("--format", choices=("csv", "json"))
    grp.add_argument("--oracle-check", dest="oracle_check", action="store_const", const=True,
                     help="validate the final state against the Fock-basis integrator")
    grp.add_argument("--oracle-dim", type=int, dest="oracle_dim", help="pin the oracle basis size")
    grp.add_argument("--oracle-dt-sub", type=float, dest="oracle_dt_sub", help="oracle RK4 substep (default tau/4)")
    grp.add_argument("--fingerprint", action="store_const", const=True,
                     help="append re_z/im_z fingerprint columns")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="su11squeeze",
        description="Squeezing dynamics of a frequency-modulated oscillator via su(1,1) step composition.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one trajectory and write it out")
    p_sim.add_argument("--preset", choices=sorted(PRESETS))
    _add_config_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run one trajectory per parameter value")
    p_sweep.add_argument("--preset", choices=sorted(PRESETS))
    p_sweep.add_argument("--sweep-param", required=True, dest="sweep_param",
                         choices=("B", "epsilon", "omega_l", "omega1", "hold_low", "hold_high",
                                  "t_final", "lam", "omega0"))
    p_sweep.add_argument("--sweep-values", required=True, dest="sweep_values",
                         help="comma-separated numeric values")
    p_sweep.add_argument("--workers", type=int, help="thread-pool size (default min(4, n))")
    _add_config_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_conv = sub.add_parser("converge", help="step-doubling convergence study")
    p_conv.add_argument("--preset", choices=sorted(PRESETS))
    _add_config_flags(p_conv)
    p_conv.set_defaults(func=cmd_converge)

    p_cmp = sub.add_parser("compare", help="run two configurations on a common grid")
    p_cmp.add_argument("--preset-a", dest="preset_a", choices=sorted(PRESETS))
    p_cmp.add_argument("--preset-b", dest="preset_b", choices=sorted(PRESETS))
    p_cmp.add_argument("--config-a", dest="config_a")
    p_cmp.add_argument("--config-b", dest="config_b")
    _add_config_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ProfileDomainError, TableRangeError, SingularCompositionError, LeakageError) as exc:
        print(f"simulation error: {exc}", file=sys.stderr)
        return EXIT_SIMULATION


if __name__ == "__main__":
    sys.exit(main())
