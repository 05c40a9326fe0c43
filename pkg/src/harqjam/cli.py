"""Command-line interface: ``harqjam {analyze,solve,simulate,sweep}``."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import _kernels
from .closed_form import expected_jam_power, expected_success, phi, success_pieces
from .experiments import FIGURES, SweepError, SweepSpec, run_sweep, write_csv, write_plot_script
from .params import SystemParams, db_to_linear, g_bar, gamma_bar
from .policy import ConvergenceError, mu_max, passive_policy, solve_p1, solve_p2
from .sim import run_simulation


class UsageError(Exception):
    pass


def _num(v) -> str:
    return format(float(v), ".10g")


def _emit(out, key, value):
    out = out or sys.stdout
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        value = _num(value)
    print(f"{key} = {value}", file=out)


def _linear_or_db(args, name, default=None):
    lin = getattr(args, name)
    db = getattr(args, name + "_db")
    if lin is not None and db is not None:
        raise UsageError(f"give either --{name} or --{name}-db, not both")
    if db is not None:
        return db_to_linear(db)
    return default if lin is None else lin


def build_params(args) -> SystemParams:
    p0 = _linear_or_db(args, "p0", 10.0)
    return SystemParams(
        p0=p0,
        rate=args.rate,
        sigma2=args.sigma2,
        lambda0=args.lambda0,
        lambda1=args.lambda1,
        lambda2=args.lambda2,
    )


def _q_ave(args) -> float:
    q = _linear_or_db(args, "qave")
    if q is None:
        raise UsageError("q_ave is required: pass --qave or --qave-db")
    if not (math.isfinite(q) and q > 0):
        raise ValueError(f"q_ave must be a finite positive number, got {q!r}")
    return q


def cmd_analyze(args, out=None):
    params = build_params(args)
    pieces = success_pieces(params)
    _emit(out, "gamma_bar", gamma_bar(params))
    _emit(out, "g_bar", g_bar(params))
    _emit(out, "phi_zero", phi(params, 0.0))
    _emit(out, "p_out_zero", pieces.p_out_zero)
    _emit(out, "p2_suc", pieces.p2_suc)
    _emit(out, "mu_max", mu_max(params))
    _emit(out, "passive_nc", expected_success(params, passive_policy(), False))
    _emit(out, "passive_cc", expected_success(params, passive_policy(), True))


def cmd_solve(args, out=None):
    params = build_params(args)
    q_ave = _q_ave(args)
    if args.mode == "nc":
        policy = solve_p1(params, q_ave)
        _emit(out, "mode", policy.mode.value)
        _emit(out, "threshold", policy.threshold)
        _emit(out, "jam_power", policy.jam_power)
        _emit(out, "avg_power", expected_jam_power(params, policy))
        _emit(out, "objective", expected_success(params, policy, False))
    else:
        sol = solve_p2(params, q_ave, tol=args.tol)
        _emit(out, "mode", sol.policy.mode.value)
        _emit(out, "threshold", sol.policy.threshold)
        _emit(out, "jam_power", sol.policy.jam_power)
        _emit(out, "mu_star", sol.mu_star)
        _emit(out, "avg_power", sol.avg_power)
        _emit(out, "objective", sol.objective)
        _emit(out, "iterations", sol.iterations)


def cmd_simulate(args, out=None):
    params = build_params(args)
    if args.packets < 1:
        raise ValueError("packets must be >= 1")
    combining = args.combining or args.mode == "cc"
    if args.mode == "passive":
        policy = passive_policy()
    elif args.mode == "nc":
        policy = solve_p1(params, _q_ave(args))
    else:
        policy = solve_p2(params, _q_ave(args), tol=args.tol).policy
    rep = run_simulation(params, policy, combining, args.packets, args.seed, args.workers)
    predicted = expected_success(params, policy, combining)
    z = (rep.success_rate - predicted) / rep.stderr if rep.stderr > 0 else 0.0
    _emit(out, "backend", _kernels.BACKEND)
    _emit(out, "policy", policy.mode.value)
    _emit(out, "combining", str(combining).lower())
    _emit(out, "packets", rep.packets)
    _emit(out, "success_rate", rep.success_rate)
    _emit(out, "stderr", rep.stderr)
    _emit(out, "avg_jam_power", rep.avg_jam_power)
    _emit(out, "retransmission_rate", rep.retransmission_rate)
    _emit(out, "analytic", predicted)
    _emit(out, "z_score", z)


def cmd_sweep(args, out=None):
    params = build_params(args)
    figure = args.figure.replace("-", "_")
    kwargs = {}
    if args.qave is not None or args.qave_db is not None:
        # only the vs_rate figure takes a fixed budget
        kwargs["q_ave_db"] = 10.0 * math.log10(_q_ave(args))
    spec = SweepSpec(figure=figure, mc_packets=args.packets, seed=args.seed, tol=args.tol, **kwargs)
    rows = run_sweep(spec, params)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    csv_path = outdir / f"{figure}.csv"
    gp_path = outdir / f"{figure}.gp"
    write_csv(rows, csv_path)
    write_plot_script(rows, gp_path)
    flagged = sum(r.flagged for r in rows)
    _emit(out, "rows", len(rows))
    _emit(out, "csv", str(csv_path))
    _emit(out, "plot_script", str(gp_path))
    _emit(out, "flagged", flagged)


def _add_common(p: argparse.ArgumentParser):
    g = p.add_argument_group("system parameters (defaults: reference setup)")
    g.add_argument("--p0", type=float, help="ST transmit power, linear")
    g.add_argument("--p0-db", type=float, help="ST transmit power in dB")
    g.add_argument("--rate", type=float, default=2.0, help="rate R in bits/s/Hz (default 2)")
    g.add_argument("--sigma2", type=float, default=1.0, help="noise power (default 1)")
    g.add_argument("--lambda0", type=float, default=1.0, help="suspicious-link rate parameter")
    g.add_argument("--lambda1", type=float, default=5.0, help="eavesdropping-link rate parameter")
    g.add_argument("--lambda2", type=float, default=5.0, help="jamming-link rate parameter")
    g.add_argument("--qave", type=float, help="average jamming power budget, linear")
    g.add_argument("--qave-db", type=float, help="average jamming power budget in dB")
    p.add_argument("--tol", type=float, default=1e-8, help="relative budget tolerance for the dual solver")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="harqjam", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="print thresholds and passive baselines")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("solve", help="optimal jamming policy")
    _add_common(p)
    p.add_argument("--mode", choices=("nc", "cc"), default="nc", help="without (nc) or with (cc) combining")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="Monte Carlo check of a policy")
    _add_common(p)
    p.add_argument("--mode", choices=("passive", "nc", "cc"), default="passive")
    p.add_argument("--combining", action="store_true", help="monitor MRC-combines (implied by --mode cc)")
    p.add_argument("--packets", type=int, default=1_000_000)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="write figure data as CSV plus a gnuplot script")
    _add_common(p)
    choices = FIGURES + tuple(f.replace("_", "-") for f in FIGURES if "_" in f)
    p.add_argument("--figure", choices=choices, required=True)
    p.add_argument("--packets", type=int, default=0, help="MC packets per row, 0 disables")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, ConvergenceError, SweepError, OSError) as exc:
        print(f"harqjam: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
