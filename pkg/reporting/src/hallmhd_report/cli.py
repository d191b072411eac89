"""The ``hallmhd-report`` command line tool.

Subcommands:

- ``energy``  energy-history figure from a run directory (optionally with
              decay envelopes for linear shell runs)
- ``sweep``   log-log scaling figure from a sweep CSV
- ``summary`` Markdown report combining runs, verification results, figures
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bundle import load_run_dir, read_sweep_csv
from .plots import plot_energy, plot_sweep
from .summary import render_summary


def cmd_energy(args) -> int:
    try:
        bundles = [load_run_dir(d, prefix=args.prefix) for d in args.run]
        check = plot_energy(bundles, args.out, epsilon=args.epsilon)
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    if check is not None:
        print(f"within envelopes: {check.within}")
        if not check.within:
            return 1
    return 0


def cmd_sweep(args) -> int:
    try:
        table = read_sweep_csv(args.csv)
        xs = table[args.x]
        ys = table[args.y]
        if args.divide_by_log:
            ys = ys / np.log(1.0 / xs)
        fit = plot_sweep(
            xs, ys, args.out,
            expected_slope=args.expected_slope,
            tolerance=args.tolerance,
            xlabel=args.x, ylabel=args.y,
        )
    except (OSError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}; fitted slope {fit.slope:+.4f}")
    if fit.within_tolerance is False:
        return 1
    return 0


def cmd_summary(args) -> int:
    try:
        bundles = [load_run_dir(d, prefix=args.prefix) for d in args.run]
        render_summary(
            bundles, args.out,
            figures=args.figure or [],
            verify_dir=args.verify_dir,
        )
    except (OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hallmhd-report",
        description="Figures and Markdown summaries from hallmhd outputs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_energy = sub.add_parser("energy", help="energy history figure")
    p_energy.add_argument("--run", action="append", required=True, help="run directory")
    p_energy.add_argument("--prefix", default="run")
    p_energy.add_argument("--out", required=True)
    p_energy.add_argument("--epsilon", type=float, default=None,
                          help="overlay exp(-2(1 -+ eps) t) envelopes")
    p_energy.set_defaults(func=cmd_energy)

    p_sweep = sub.add_parser("sweep", help="log-log scaling figure")
    p_sweep.add_argument("--csv", required=True)
    p_sweep.add_argument("--x", default="epsilon")
    p_sweep.add_argument("--y", required=True)
    p_sweep.add_argument("--expected-slope", type=float, default=None)
    p_sweep.add_argument("--tolerance", type=float, default=0.3)
    p_sweep.add_argument("--divide-by-log", action="store_true",
                         help="divide y by log(1/x) before fitting")
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_sum = sub.add_parser("summary", help="Markdown report")
    p_sum.add_argument("--run", action="append", required=True)
    p_sum.add_argument("--prefix", default="run")
    p_sum.add_argument("--figure", action="append")
    p_sum.add_argument("--verify-dir", default=None)
    p_sum.add_argument("--out", required=True)
    p_sum.set_defaults(func=cmd_summary)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
