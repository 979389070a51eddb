"""
Command-line front end.

    ddqpc simulate --alpha 5 --theta 0 --tau-max 1
    ddqpc simulate --t1 0.5 --vd 62.8318 --omega0 1 --theta 0
    ddqpc sweep --alphas 0.1 1 10 --thetas 0 90 -o sweep.csv --summary sweep.json
    ddqpc optimize --theta 0 --tau 1
    ddqpc cycling --alpha 0.01
    ddqpc monotonicity --n-random 200 --seed 0
    ddqpc figures fig2 fig5 --out-dir figures/

Exit status: 0 on success, 1 on a numerical failure, 2 on a usage error.
"""

import argparse
import json
import math
import sys
from pathlib import Path

from ddqpc import analysis
from ddqpc.dynamics import (CLOSED_FORM, DEFAULT_STEP, INTEGRATED, ModelParams, PhysicalParams,
                            params_from_physical)
from ddqpc.errors import NumericalError, ParameterError
from ddqpc.sweep import (FIGURE_PRESETS, SweepGrid, figure_preset, run_sweep, write_csv,
                         write_json_summary)

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _log_base(text):
    if text in ("2", "e"):
        return 2 if text == "2" else "e"
    raise argparse.ArgumentTypeError("log base must be 2 or e")


def _add_state_args(p):
    p.add_argument("--theta", type=float, default=0.0, help="initial polar angle, degrees")
    p.add_argument("--phi", type=float, default=0.0, help="initial azimuth, degrees")


def _add_coupling_args(p):
    p.add_argument("--alpha", type=float, help="normalized coupling Gamma_d / Omega0")
    p.add_argument("--epsilon", type=float, default=None,
                   help="normalized detuning (E2 - E1) / Omega0")
    phys = p.add_argument_group("physical units (alternative to --alpha/--epsilon)")
    phys.add_argument("--t1", type=float, help="point-contact transmission, left dot occupied")
    phys.add_argument("--vd", type=float, help="bias voltage")
    phys.add_argument("--omega0", type=float, help="inter-dot coupling")
    phys.add_argument("--e1", type=float, help="left-dot level")
    phys.add_argument("--e2", type=float, help="right-dot level")


def _model_params(args) -> ModelParams:
    physical = [args.t1, args.vd, args.omega0, args.e1, args.e2]
    uses_physical = any(v is not None for v in physical)
    if uses_physical and (args.alpha is not None or args.epsilon is not None):
        raise UsageError("give either --alpha/--epsilon or the physical-unit flags, not both")
    if uses_physical:
        if args.t1 is None or args.vd is None:
            raise UsageError("physical units need at least --t1 and --vd")
        phys = PhysicalParams(args.t1, args.vd,
                              1.0 if args.omega0 is None else args.omega0,
                              args.e1 or 0.0, args.e2 or 0.0)
        return params_from_physical(phys, args.theta, args.phi).params
    if args.alpha is None:
        raise UsageError("one of --alpha or the physical-unit flags (--t1, --vd) is required")
    return ModelParams(args.alpha, args.epsilon or 0.0, args.theta, args.phi)


def _method(requested, epsilon):
    if requested is not None:
        return requested
    return CLOSED_FORM if epsilon == 0 else INTEGRATED


def cmd_simulate(args, out):
    params = _model_params(args)
    grid = SweepGrid(alphas=(params.alpha,), thetas_deg=(params.theta_deg,),
                     phis_deg=(params.phi_deg,), epsilon_norm=params.epsilon_norm,
                     tau_max=args.tau_max, n_samples=args.samples,
                     method=_method(args.method, params.epsilon_norm),
                     log_base=args.log_base, step=args.step)
    result = run_sweep(grid)
    write_csv(result, args.output)
    curve = result.curves[0]
    final = curve.trajectory.final
    unit = "bits" if args.log_base == 2 else "nats"
    print(f"alpha: {params.alpha:.6g}", file=out)
    print(f"final tau: {curve.trajectory.tau_grid[-1]:.6g}", file=out)
    print(f"final sigma11: {final.sigma11:.10f}", file=out)
    print(f"final entropy: {curve.measures.entropy[-1]:.10f} {unit}", file=out)
    print(f"wrote {len(result)} rows to {args.output}", file=out)


def cmd_sweep(args, out):
    method = _method(args.method, args.epsilon)
    grid = SweepGrid(alphas=args.alphas, thetas_deg=args.thetas, phis_deg=args.phis,
                     epsilon_norm=args.epsilon, tau_max=args.tau_max, n_samples=args.samples,
                     method=method, log_base=args.log_base, step=args.step)
    result = run_sweep(grid, workers=args.workers)
    n = write_csv(result, args.output)
    print(f"wrote {n} rows to {args.output}", file=out)
    if args.summary:
        write_json_summary(result, args.summary)
        print(f"wrote summary to {args.summary}", file=out)


def cmd_optimize(args, out):
    if not args.tau > 0:
        raise UsageError("--tau must be > 0")
    opt = analysis.optimize_coupling(args.theta, args.phi, args.tau, args.alpha_min,
                                     args.alpha_max, args.grid_points, args.log_base)
    s5 = analysis.entropy_at(args.theta, args.phi, 5.0, args.tau, args.log_base)
    print(f"alpha_star: {opt.alpha_star:.6f}", file=out)
    print(f"S(alpha_star): {opt.entropy_star:.10f}", file=out)
    print(f"S(5): {s5:.10f}", file=out)
    ratio = s5 / opt.entropy_star if opt.entropy_star > 0 else math.nan
    print(f"ratio S(5)/S(alpha_star): {ratio:.6f}", file=out)
    if opt.on_boundary:
        print("maximum on the grid boundary: no interior optimum in "
              f"[{args.alpha_min:g}, {args.alpha_max:g}]", file=out)
    else:
        print("interior optimum", file=out)


def cmd_cycling(args, out):
    report = analysis.detect_cycling(args.alpha, args.theta, args.phi, args.tau_max,
                                     args.resolution)
    print(json.dumps(report.to_dict(), indent=2), file=out)


def cmd_monotonicity(args, out):
    violations = analysis.monotonicity_scan(args.n_random, args.seed, args.tau_max,
                                            args.samples, args.tolerance)
    print(json.dumps({
        "n_random": args.n_random,
        "seed": args.seed,
        "violations": [{"case": v.case, "index": v.index, "tau": v.tau, "drop": v.drop,
                        "alpha": v.params.alpha, "theta_deg": v.params.theta_deg,
                        "phi_deg": v.params.phi_deg} for v in violations],
    }, indent=2), file=out)


def cmd_figures(args, out):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in args.names:
        result = run_sweep(figure_preset(name), workers=args.workers)
        n = write_csv(result, out_dir / f"{name}.csv")
        write_json_summary(result, out_dir / f"{name}.json")
        print(f"{name}: {len(result.curves)} curves, {n} rows -> {out_dir / (name + '.csv')}",
              file=out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ddqpc",
        description="Entanglement dynamics of a double-dot qubit and a point-contact detector.")
    sub = parser.add_subparsers(dest="command", required=True)

    def sampling(p):
        p.add_argument("--tau-max", type=float, default=10.0)
        p.add_argument("--samples", type=int, default=1000)
        p.add_argument("--method", choices=(CLOSED_FORM, INTEGRATED), default=None,
                       help="default: closed-form when epsilon is 0, else integrated")
        p.add_argument("--step", type=float, default=DEFAULT_STEP, help="RK4 step in tau")
        p.add_argument("--log-base", type=_log_base, default=2)

    p = sub.add_parser("simulate", help="one trajectory to CSV")
    _add_coupling_args(p)
    _add_state_args(p)
    sampling(p)
    p.add_argument("-o", "--output", default="trajectory.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Cartesian parameter sweep to CSV (+ JSON summary)")
    p.add_argument("--alphas", type=float, nargs="+", required=True)
    p.add_argument("--thetas", type=float, nargs="+", default=[0.0])
    p.add_argument("--phis", type=float, nargs="+", default=[0.0])
    p.add_argument("--epsilon", type=float, default=0.0)
    sampling(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-o", "--output", default="sweep.csv")
    p.add_argument("--summary", default=None, help="JSON summary path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", help="coupling that maximizes S at fixed tau")
    _add_state_args(p)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--alpha-min", type=float, default=0.1)
    p.add_argument("--alpha-max", type=float, default=20.0)
    p.add_argument("--grid-points", type=int, default=400)
    p.add_argument("--log-base", type=_log_base, default=2)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("cycling", help="coherence zeros and cycling period (JSON)")
    p.add_argument("--alpha", type=float, required=True)
    _add_state_args(p)
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--resolution", type=float, default=None, help="scan spacing in tau")
    p.set_defaults(func=cmd_cycling)

    p = sub.add_parser("monotonicity", help="random scan for entropy decreases (JSON)")
    p.add_argument("--n-random", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau-max", type=float, default=10.0)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.set_defaults(func=cmd_monotonicity)

    p = sub.add_parser("figures", help="regenerate figure data files")
    p.add_argument("names", nargs="+", choices=sorted(FIGURE_PRESETS))
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        args.func(args, out)
    except (UsageError, ParameterError) as exc:
        print(f"ddqpc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, OSError) as exc:
        print(f"ddqpc {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
