"""Command-line interface.

Subcommands: simulate (one time series), sweep (scaling report over an atom
number list), fit (power-law fit of a points file), check (convergence
comparison of two reports).  Exit codes: 0 success, 1 validation error,
2 runtime failure.  Rates are in units of the active atomic decay half-rate.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import (ConvergenceVerdict, IncomparableReportsError,
                       UnresolvedBurstError, convergence_check, power_law_fit,
                       scaling_sweep)
from .fileio import (RunManifest, read_points_file, read_report, write_manifest,
                     write_report, write_timeseries)
from .params import (ConfigurationError, NumericalParams, collective_params,
                     individual_params, validate_params)
from .runners import resolve_solver, simulate_timeseries


def _add_physics_flags(p: argparse.ArgumentParser):
    p.add_argument("--scheme", required=True, choices=["collective", "individual"])
    p.add_argument("--g", type=float, default=0.0,
                   help="atom-cavity coupling (units of the decay rate)")
    p.add_argument("--kappa", type=float, default=0.0, help="cavity decay half-rate")
    p.add_argument("--gamma", type=float, default=1.0,
                   help="atomic decay half-rate (the time unit; default 1)")
    p.add_argument("--detuning", type=float, default=0.0,
                   help="omega_c - omega_a in the rotating frame (default resonance)")
    p.add_argument("--t-max", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--trajectories", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--smoothing-window", type=int, default=5)


def _raw_config(args, n_atoms: int):
    make = collective_params if args.scheme == "collective" else individual_params
    params = make(n_atoms=n_atoms, g=args.g, kappa=args.kappa, gamma=args.gamma,
                  detuning=args.detuning)
    num = NumericalParams(n_traj=args.trajectories, seed=args.seed, dt=args.dt,
                          t_max=args.t_max, smoothing_window=args.smoothing_window)
    return params, num


def _config_echo(args, params, num) -> dict:
    return {
        "scheme": args.scheme,
        "solver": args.solver,
        "n_atoms": params.n_atoms,
        "g": params.g,
        "kappa": params.kappa,
        "gamma": params.gamma,
        "detuning": params.omega_c - params.omega_a,
        "frame": params.frame,
        "dt": num.dt,
        "t_max": num.t_max,
        "n_traj": num.n_traj,
        "seed": num.seed,
        "smoothing_window": num.smoothing_window,
        "alpha_sampling": num.alpha_sampling,
    }


def _cmd_simulate(args) -> int:
    resolve_solver(args.scheme, args.solver)
    params, num = validate_params(*_raw_config(args, args.n_atoms))
    series, info = simulate_timeseries(args.scheme, args.solver, params, num)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_timeseries(series, out / "timeseries.csv")
    manifest = RunManifest(config=_config_echo(args, params, num),
                           master_seed=num.seed, solver=info.solver_id,
                           version=__version__, n_divergent=info.n_divergent,
                           wall_clock_s=info.wall_clock_s)
    write_manifest(manifest, out)
    print(f"wrote {out / 'timeseries.csv'} ({len(series.times)} points, "
          f"{info.n_divergent} divergent)")
    return 0


def _cmd_sweep(args) -> int:
    solver = resolve_solver(args.scheme, args.solver)
    n_list = [int(v) for v in args.n_list.split(",")]
    # keep dt / t_max unresolved so the sweep adapts them per N
    params, num = _raw_config(args, n_list[0])
    validate_params(params, num)
    import time
    start = time.perf_counter()
    report = scaling_sweep(args.scheme, solver, n_list, params, num)
    manifest = RunManifest(config=report.config, master_seed=num.seed,
                           solver=f"cavity-sr {__version__} {args.scheme}/{solver}",
                           version=__version__,
                           n_divergent=int(sum(report.divergent)),
                           wall_clock_s=time.perf_counter() - start)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_report(report, manifest, out / "report.json")
    write_manifest(manifest, out)
    print(f"zeta = {report.zeta:.4f} +- {report.zeta_stderr:.4f} "
          f"(r^2 = {report.r_squared:.5f}) -> {out / 'report.json'}")
    return 0


def _cmd_fit(args) -> int:
    points = read_points_file(args.input)
    fit = power_law_fit(points)
    result = {"zeta": fit.zeta, "intercept": fit.intercept,
              "r_squared": fit.r_squared, "zeta_stderr": fit.zeta_stderr,
              "points": [{"n": n, "intensity": i} for n, i in points]}
    text = json.dumps(result, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _cmd_check(args) -> int:
    verdict = convergence_check(read_report(args.report_a), read_report(args.report_b))
    print(json.dumps({"passed": verdict.passed, "delta": verdict.delta,
                      "variation": verdict.variation,
                      "tolerance": ConvergenceVerdict.TOLERANCE}, indent=2))
    return 0 if verdict.passed else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavity-sr",
        description="Cavity-controlled superradiance: stochastic phase-space "
                    "simulation and scaling analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one time-series simulation")
    _add_physics_flags(p_sim)
    p_sim.add_argument("--solver", required=True,
                       choices=["twa", "dtwa", "meanfield", "oracle"])
    p_sim.add_argument("--n-atoms", type=int, required=True)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="scaling sweep over atom numbers")
    _add_physics_flags(p_sweep)
    p_sweep.add_argument("--solver", default="stochastic",
                         choices=["stochastic", "meanfield"])
    p_sweep.add_argument("--n-list", default="50,100,200,400",
                         help="comma-separated atom numbers")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_fit = sub.add_parser("fit", help="power-law fit of a points file")
    p_fit.add_argument("--input", required=True,
                       help="report JSON or CSV with header n,intensity[,sem]")
    p_fit.add_argument("--out", default=None)
    p_fit.set_defaults(func=_cmd_fit)

    p_check = sub.add_parser("check", help="convergence check of two reports")
    p_check.add_argument("report_a")
    p_check.add_argument("report_b")
    p_check.set_defaults(func=_cmd_check)
    return parser


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:           # argparse exits 2 on bad flags
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigurationError, IncomparableReportsError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UnresolvedBurstError, RuntimeError, OSError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_dispatch())


if __name__ == "__main__":
    main()
