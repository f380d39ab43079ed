"""Command line interface: run an experiment, validate a config, analyze results."""

from __future__ import annotations

import argparse
import sys

from . import __version__, kernels
from .analysis import METRICS, AnalysisError, report
from .runner import ConfigError, load_config, parse_group_sizes, run_experiment


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="flat key=value config file")
    parser.add_argument("--seed", type=int, dest="master_seed", metavar="N", help="master seed")
    parser.add_argument(
        "--group-sizes", type=parse_group_sizes, metavar="a,b,c", help="agent counts to run"
    )
    parser.add_argument("--replications", type=int, metavar="N")
    parser.add_argument("--max-trials", type=int, metavar="N")
    parser.add_argument("--out", dest="out_dir", metavar="DIR", help="output directory")
    parser.add_argument("--jobs", type=int, metavar="N", help="parallel jobs (0 = all cores)")
    parser.add_argument("--p-const", type=float, metavar="P")
    parser.add_argument("--p-nand", type=float, metavar="P")
    parser.add_argument("--min-components", type=int, metavar="N")
    parser.add_argument("--max-components", type=int, metavar="N")
    parser.add_argument("--max-external-inputs", type=int, metavar="N")
    parser.add_argument("--close-threshold", type=float, metavar="C")
    parser.add_argument(
        "--write-junk", choices=("true", "false"), help="write junk rows to event files"
    )
    parser.add_argument(
        "--store-drafts", choices=("true", "false"), help="keep full drafts for pooled circuits"
    )


def _overrides(args: argparse.Namespace) -> dict:
    keys = (
        "master_seed",
        "group_sizes",
        "replications",
        "max_trials",
        "out_dir",
        "jobs",
        "p_const",
        "p_nand",
        "min_components",
        "max_components",
        "max_external_inputs",
        "close_threshold",
    )
    values = {k: getattr(args, k, None) for k in keys}
    for flag in ("write_junk", "store_drafts"):
        raw = getattr(args, flag, None)
        if raw is not None:
            values[flag] = raw == "true"
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nandscape",
        description="Open-ended NAND-circuit evolution experiments",
    )
    parser.add_argument("--version", action="version", version=f"nandscape {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment")
    _add_config_flags(p_run)

    p_val = sub.add_parser("validate", help="check a configuration and exit")
    _add_config_flags(p_val)

    p_an = sub.add_parser("analyze", help="post-process a finished experiment")
    p_an.add_argument("--in", dest="in_dir", required=True, metavar="DIR")
    p_an.add_argument("--out", dest="out_dir", required=True, metavar="DIR")
    p_an.add_argument(
        "--metrics",
        metavar="m1,m2",
        help=f"subset of {','.join(METRICS)} (default: all)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    if args.command in ("run", "validate"):
        try:
            config = load_config(args.config, _overrides(args))
        except (ConfigError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        errors = config.validate()
        if args.command == "validate":
            if errors:
                for err in errors:
                    print(f"invalid: {err}", file=sys.stderr)
                return 2
            print("config ok")
            print(f"jobs: {len(config.jobs_list())}, backend: {kernels.BACKEND}")
            return 0
        if errors:
            for err in errors:
                print(f"invalid: {err}", file=sys.stderr)
            return 2
        return run_experiment(config)

    if args.command == "analyze":
        metrics = METRICS
        if args.metrics:
            metrics = tuple(m for m in args.metrics.replace(",", " ").split())
        try:
            result = report(args.in_dir, args.out_dir, metrics)
        except AnalysisError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        for note in result["notes"]:
            print(f"note: {note}", file=sys.stderr)
        return 0

    return 2


if __name__ == "__main__":
    raise SystemExit(main())
