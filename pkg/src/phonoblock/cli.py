"""Command-line interface.

Subcommands::

    phonoblock sweep <config.ini> -o out.csv [--workers N]
    phonoblock g2tau <config.ini> -o out.csv [--workers N]
    phonoblock optimal single --j <value-or-grid> [--branch plus|minus] [-o csv]
    phonoblock optimal two --u U --j J --delta D [--omega1 W]
    phonoblock verify

Exit codes: 0 success, 1 configuration or usage error, 2 numerical failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import __version__
from .model import MechParams, WeakDriveWarning
from .optimal import (
    coefficient_matrix,
    quadratic_coeffs,
    single_drive_optimal,
    two_drive_optimal,
)
from .steady import DegenerateSteadyStateError, SteadyStateError
from .sweep import (
    ConfigError,
    load_config,
    resolve_workers,
    run_sweep,
    _parse_value_list,
)
from .verify import run_all_checks

__all__ = ["cli_main", "main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_VERIFY = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures routed to exit code 1."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _build_parser() -> _Parser:
    parser = _Parser(prog="phonoblock", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"phonoblock {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("sweep", "run a parameter sweep from a config file"),
        ("g2tau", "run a delayed-correlation sweep (config needs a tau axis)"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="INI sweep configuration")
        p.add_argument("-o", "--output", required=True, help="CSV output path")
        p.add_argument("--workers", type=int, default=None,
                       help="worker processes (default: PHONOBLOCK_WORKERS or 1)")

    opt = sub.add_parser("optimal", help="print closed-form optimal blockade parameters")
    opt_sub = opt.add_subparsers(dest="regime", required=True)

    single = opt_sub.add_parser("single", help="single-drive optimum from the coupling")
    single.add_argument("--j", required=True,
                        help="coupling in units of gamma; scalar or grid start:stop:count")
    single.add_argument("--branch", choices=("plus", "minus"), default="plus")
    single.add_argument("-o", "--output", default=None,
                        help="write a j,delta_opt,u_opt CSV instead of printing")

    two = opt_sub.add_parser("two", help="two-drive optimum at fixed detuning")
    two.add_argument("--u", required=True, type=float, help="Kerr strength / gamma")
    two.add_argument("--j", required=True, type=float, help="coupling / gamma")
    two.add_argument("--delta", required=True, type=float, help="detuning / gamma")
    two.add_argument("--omega1", type=float, default=0.1,
                     help="first drive used in the determinant check (default 0.1)")

    sub.add_parser("verify", help="run the built-in oracle suite")
    return parser


def _relative_a0(u: float, j: float, delta: float) -> float:
    coeffs = quadratic_coeffs(u, j, delta)
    scale = max(abs(coeffs.a2), abs(coeffs.a1), abs(coeffs.a0), 1e-300)
    return abs(coeffs.a0) / scale


def _cmd_optimal_single(args) -> int:
    values = _parse_value_list("--j", args.j)
    branch = 1 if args.branch == "plus" else -1
    if len(values) == 1 and args.output is None:
        opt = single_drive_optimal(values[0], 1.0, branch)
        print(f"delta_opt = {opt.delta_opt:.12g}")
        print(f"u_opt = {opt.u_opt:.12g}")
        print(f"relative |a0| at optimum = {_relative_a0(opt.u_opt, opt.j, opt.delta_opt):.3e}")
        return EXIT_OK
    lines = []
    for j in values:
        try:
            opt = single_drive_optimal(j, 1.0, branch)
            lines.append(f"{j:.12g},{opt.delta_opt:.12g},{opt.u_opt:.12g}")
        except ValueError:
            lines.append(f"{j:.12g},nan,nan")
    body = "j,delta_opt,u_opt\n" + "\n".join(lines) + "\n"
    if args.output is None:
        sys.stdout.write(body)
    else:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"# phonoblock {__version__} optimal single branch={args.branch}\n")
            fh.write(body)
    return EXIT_OK


def _cmd_optimal_two(args) -> int:
    coeffs = quadratic_coeffs(args.u, args.j, args.delta)
    for opt in two_drive_optimal(args.u, args.j, args.delta):
        label = "+" if opt.branch == 1 else "-"
        print(
            f"branch {label}: zeta = {opt.zeta:.12g}, phi = {opt.phi:.12g} rad"
            f" (phi/pi = {opt.phi_over_pi:.12g})"
        )
        print(f"  quadratic residual (relative) = {coeffs.residual(opt.z):.3e}")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", WeakDriveWarning)
            params = MechParams(
                delta=args.delta, u=args.u, j=args.j, omega1=args.omega1,
                omega2=opt.zeta * args.omega1, phi=opt.phi,
            )
        for power, label2 in ((1, "linear-phase"), (2, "squared-phase")):
            x = coefficient_matrix(params, x22_phase_power=power)
            resid = abs(np.linalg.det(x)) / float(np.abs(x).max()) ** 3
            print(f"  determinant residual ({label2} x22, relative) = {resid:.3e}")
    return EXIT_OK


def _cmd_sweep(args, need_tau: bool) -> int:
    config = load_config(args.config)
    if need_tau and config.tau_axis is None:
        raise ConfigError(f"{args.config}: g2tau requires a tau axis (declared last)")
    if not need_tau and config.tau_axis is not None:
        raise ConfigError(f"{args.config}: config has a tau axis; use the g2tau subcommand")
    workers = resolve_workers(args.workers)
    result = run_sweep(config, workers=workers)
    result.write_csv(args.output)
    total = len(result.rows)
    if result.n_failed:
        print(f"note: {result.n_failed}/{total} rows carry a nonzero error code",
              file=sys.stderr)
    if result.n_weak_drive:
        print(f"note: {result.n_weak_drive}/{total} rows exceed the weak-drive limit",
              file=sys.stderr)
    if result.n_unconverged:
        print(f"note: {result.n_unconverged}/{total} rows failed the convergence check",
              file=sys.stderr)
    if total and result.n_failed == total:
        print("error: every grid point failed", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"wrote {total} rows to {args.output}")
    return EXIT_OK


def _cmd_verify() -> int:
    results = run_all_checks()
    width = max(len(r.name) for r in results)
    failed = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        failed += not r.passed
        print(f"{status}  {r.name:<{width}}  {r.detail}")
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def cli_main(argv) -> int:
    """Run one CLI invocation and return its exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "sweep":
            return _cmd_sweep(args, need_tau=False)
        if args.command == "g2tau":
            return _cmd_sweep(args, need_tau=True)
        if args.command == "optimal":
            if args.regime == "single":
                return _cmd_optimal_single(args)
            return _cmd_optimal_two(args)
        return _cmd_verify()
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        SteadyStateError,
        DegenerateSteadyStateError,
        ValueError,
        ArithmeticError,
    ) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
