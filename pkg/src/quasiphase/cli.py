"""Command-line front end.

Exit codes: 0 success, 1 validation error (bad flags, bad input, inadequate
cutoff), 2 numerical-tolerance or I/O failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import warnings

import numpy as np

from .campaign import CampaignPlan, reconstruct
from .errors import QuasiphaseError, ToleranceError, ValidationError
from .fock_core import TruncatedFockSpace
from .formats import FORMATS, StateSpec, export_map, parse_complex, to_csv, to_json
from .protocol import OscillatorParams, autocorrelation, calibrate_sign
from .quasiprob import GridSpec, evaluate_grid, evaluate_point

OUTPUT_DIR_ENV = "QUASIPHASE_OUTPUT_DIR"
DEFAULT_GRID = "-3:3:41,-3:3:41"

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def _output_path(path):
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _format_for(args):
    if args.format:
        return args.format
    if args.out:
        ext = os.path.splitext(args.out)[1].lstrip(".").lower()
        if ext in FORMATS:
            return ext
    return "csv"


def _space(spec, alpha_abs):
    return TruncatedFockSpace(spec.default_dim(alpha_abs))


def _emit(obj, args):
    fmt = _format_for(args)
    if args.out:
        export_map(obj, fmt, _output_path(args.out), autoscale=getattr(args, "autoscale", False))
    elif fmt == "json":
        sys.stdout.write(to_json(obj))
    elif fmt == "csv":
        sys.stdout.write(to_csv(obj))
    else:
        raise ValidationError("PGM output needs --out")


def cmd_qdist(args):
    spec = StateSpec.parse(args.state, args.dim)
    if (args.alpha is None) == (args.grid is None):
        raise ValidationError("give exactly one of --alpha or --grid")
    if args.alpha is not None:
        alpha = parse_complex(args.alpha)
        psi = spec.build(_space(spec, abs(alpha)))
        value = evaluate_point(psi, alpha, args.s)
        print(f"{value:.9f}")
        return EXIT_OK
    grid = GridSpec.parse(args.grid)
    psi = spec.build(_space(spec, abs(grid.farthest_corner())))
    qmap = evaluate_grid(psi, args.s, grid, workers=args.workers, descriptor=str(spec))
    _emit(qmap, args)
    return EXIT_OK


def cmd_reconstruct(args):
    spec = StateSpec.parse(args.state, args.dim)
    grid = GridSpec.parse(args.grid)
    plan = CampaignPlan(
        grid=grid,
        omega=args.omega,
        state=str(spec),
        mode=args.mode,
        shots=args.shots,
        seed=args.seed,
        workers=args.workers,
    )
    # each experiment swings the state out to twice the probed amplitude
    psi = spec.build(_space(spec, 2 * abs(grid.farthest_corner())))
    report = reconstruct(plan, psi)
    if args.out:
        _emit(report, args)
    if args.report:
        export_map(report, "json", _output_path(args.report))
    print(f"max_abs_error={report.max_abs_error:.6e} rms_error={report.rms_error:.6e}")
    return EXIT_OK


def cmd_autocorr(args):
    spec = StateSpec.parse(args.state, args.dim)
    beta = parse_complex(args.beta)
    params = OscillatorParams(args.omega, beta)
    # the trajectory circles -beta/omega at radius up to |beta/omega| + state size
    psi = spec.build(_space(spec, 2 * abs(params.shift)))
    t_max = args.t_max if args.t_max is not None else 2 * math.pi / args.omega
    if args.t_steps < 1:
        raise ValidationError("--t-steps must be at least 1")
    times = np.linspace(0.0, t_max, args.t_steps)
    lines = ["t,re_A,im_A,re_A_corrected,im_A_corrected"]
    for t in times:
        sample = autocorrelation(psi, params, t)
        lines.append(
            ",".join(
                format(x, ".17g")
                for x in (
                    t,
                    sample.value.real,
                    sample.value.imag,
                    sample.phase_corrected.real,
                    sample.phase_corrected.imag,
                )
            )
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(_output_path(args.out), "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_calibrate_sign(args):
    sigma, rows = calibrate_sign(dim=args.dim or 64, omega=args.omega)
    print(f"calibrated sign: {sigma:+d}  (measured point = {sigma:+d} * beta/omega)")
    print(f"{'state':<20} {'beta/omega':>14} {'(2/pi)A':>14} {'W(+b)':>14} {'W(-b)':>14}  match")
    for label, beta, w, plus, minus, sign in rows:
        match = {1: "+", -1: "-", 0: "both"}[sign]
        print(f"{label:<20} {str(beta):>14} {w:>14.10f} {plus:>14.10f} {minus:>14.10f}  {match}")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="quasiphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--dim", type=int, default=None, help="Fock cutoff (default: smallest adequate, at least 64)")
    common.add_argument("--workers", type=int, default=None, help="threads for grid evaluation")

    p = sub.add_parser("qdist", parents=[common], help="evaluate F(alpha, s) at a point or on a grid")
    p.add_argument("--state", required=True, help="fock:N, coherent:A, cat-even:A, cat-odd:A or superposition:c0,c1,...")
    p.add_argument("--s", type=float, default=0.0, help="ordering parameter: -1 Husimi, 0 Wigner")
    p.add_argument("--alpha", help="single point; prints the value")
    p.add_argument("--grid", help="re_min:re_max:n,im_min:im_max:n")
    p.add_argument("--out", help="output file; relative paths resolve against $QUASIPHASE_OUTPUT_DIR")
    p.add_argument("--format", choices=FORMATS, help="default: from the --out suffix")
    p.add_argument("--autoscale", action="store_true", help="PGM: scale to the map's own range")
    p.set_defaults(func=cmd_qdist)

    p = sub.add_parser("reconstruct", parents=[common], help="Wigner map from one protocol run per grid point")
    p.add_argument("--state", required=True, help="fock:N, coherent:A, cat-even:A, cat-odd:A or superposition:c0,c1,...")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--grid", default=DEFAULT_GRID, help=f"re_min:re_max:n,im_min:im_max:n (default {DEFAULT_GRID})")
    p.add_argument("--mode", choices=("exact", "shots"), default="exact")
    p.add_argument("--shots", type=int, default=10_000, help="shots per grid point (shots mode)")
    p.add_argument("--seed", type=int, default=0, help="base seed; point i uses seed XOR i")
    p.add_argument("--out", help="output file; relative paths resolve against $QUASIPHASE_OUTPUT_DIR")
    p.add_argument("--format", choices=FORMATS, help="default: from the --out suffix")
    p.add_argument("--autoscale", action="store_true")
    p.add_argument("--report", help="write the full JSON report (maps and error metrics) here")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("autocorr", parents=[common], help="autocorrelation A(t) of the driven oscillator")
    p.add_argument("--state", required=True, help="fock:N, coherent:A, cat-even:A, cat-odd:A or superposition:c0,c1,...")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--beta", default="0")
    p.add_argument("--t-max", type=float, default=None, help="default: one period 2*pi/omega")
    p.add_argument("--t-steps", type=int, default=101)
    p.add_argument("--out", help="output file; relative paths resolve against $QUASIPHASE_OUTPUT_DIR")
    p.set_defaults(func=cmd_autocorr)

    p = sub.add_parser("calibrate-sign", parents=[common], help="derive the measured-point sign and print the evidence")
    p.add_argument("--omega", type=float, default=1.0)
    p.set_defaults(func=cmd_calibrate_sign)
    return parser


# flags whose values may legitimately start with "-"
_SIGNED_VALUE_FLAGS = ("--grid", "--alpha", "--beta", "--s")


def _join_signed_values(argv):
    out = []
    it = iter(argv)
    for token in it:
        if token in _SIGNED_VALUE_FLAGS:
            value = next(it, None)
            out.append(token if value is None else f"{token}={value}")
        else:
            out.append(token)
    return out


def run_cli(argv=None):
    parser = build_parser()
    argv = _join_signed_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_VALIDATION
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_VALIDATION
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = _show_warning
            return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ToleranceError, QuasiphaseError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main():
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
