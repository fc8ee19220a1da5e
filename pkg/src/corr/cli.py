"""Command-line entry point: ``corr <experiment> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import ConfigError, dump_debug, load_config, run_experiment
from .testbed import FUNCTION_NAMES

SUBCOMMANDS = {
    "optimize": "optimize",
    "sweep": "sweep",
    "scale": "scale",
    "compare": "compare",
    "mu-trace": "mu_trace",
}


def _ints(text):
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _names(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="corr",
        description="Run convex relaxation regression experiments and write CSV and SVG results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in SUBCOMMANDS:
        p = sub.add_parser(cmd, help=f"run the {cmd} experiment")
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--function", type=_names, help=f"comma-separated names from {', '.join(FUNCTION_NAMES)}")
        p.add_argument("--dim", type=_ints, help="comma-separated dimensions")
        p.add_argument("--t", type=_ints, help="comma-separated sample sizes T (increasing)")
        p.add_argument("--trials", type=int, help="trials per cell (default 20)")
        p.add_argument("--seed", type=int, help="base seed")
        p.add_argument("--out", help="output directory (default ./results)")
        p.add_argument("--method", type=_names, help="comma-separated methods for compare")
        p.add_argument("--polish", action="store_true", default=None, help="refine CoRR's answer with Nelder-Mead")
        p.add_argument("--workers", type=int, help="parallel worker processes")
        p.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics")
        if cmd == "optimize":
            p.add_argument("--dump", action="store_true", help="also write sample CSVs and the fit LP of trial 0")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    experiment = SUBCOMMANDS[args.command]
    try:
        overrides = dict(
            experiment=experiment,
            functions=args.function,
            dims=args.dim,
            t_values=args.t,
            trials=args.trials,
            base_seed=args.seed,
            output_dir=args.out,
            methods=args.method,
            workers=args.workers,
        )
        cfg = load_config(args.config, **overrides)
        if args.polish:
            cfg.corr = {**cfg.corr, "polish": True}
            cfg.validate()
        report = run_experiment(cfg)
        if getattr(args, "dump", False):
            report.files.update(dump_debug(cfg, report.run_dir))
    except (ConfigError, OSError, ValueError) as exc:
        print(f"corr: error: {exc}", file=sys.stderr)
        return 2
    print(report.run_dir)
    for row in report.aggregate:
        print(
            f"{row['function']:>18} n={row['dim']:<3} T={row['T']:<7} {row['method']:<20}"
            f" mean={row['mean']:.3e} median={row['median']:.3e}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
