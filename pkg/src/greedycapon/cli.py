"""Command-line entry point.

    greedycapon run --preset fig1-left [--trials T] [--seed S] [--out PATH] [--format csv|txt]
    greedycapon run --config my.json
    greedycapon bench --preset table1-timing --reps 20
    greedycapon list-presets
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import ConfigError, list_presets, load_config, load_preset
from .experiments import benchmark_timing, run_experiment
from .results import FORMATS, emit_results, format_table


def _add_source(p):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", help="name of a shipped preset (see list-presets)")
    group.add_argument("--config", help="path to a JSON experiment config")


def _add_output(p):
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="greedycapon", description=__doc__.splitlines()[0] or None)
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a Monte-Carlo sweep")
    _add_source(run)
    run.add_argument("--trials", type=int, help="override the number of trials")
    run.add_argument("--seed", type=int, help="override the master seed")
    run.add_argument("--workers", type=int, default=1, help="worker processes (output does not depend on it)")
    _add_output(run)

    bench = sub.add_parser("bench", help="time each method per call")
    _add_source(bench)
    bench.add_argument("--reps", type=int, default=20, help="timed calls per sweep point (>= 10)")
    bench.add_argument("--grid-size", type=int, help="override the grid size M")
    _add_output(bench)

    sub.add_parser("list-presets", help="list shipped presets")
    return parser


def _load(args):
    return load_preset(args.preset) if args.preset else load_config(args.config)


def _write(table, args):
    if args.out:
        emit_results(table, args.out, args.format)
    else:
        sys.stdout.write(format_table(table, args.format))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")

    if args.command == "list-presets":
        for name, desc in list_presets().items():
            print(f"{name:26s} {desc}")
        return 0

    try:
        config = _load(args)
        if args.command == "run":
            if args.trials is not None and args.trials < 1:
                raise ConfigError("--trials: must be at least 1")
            config = config.with_overrides(trials=args.trials, seed=args.seed)
            table = run_experiment(config, workers=max(args.workers, 1))
        else:
            table = benchmark_timing(config, repetitions=args.reps, grid_size=args.grid_size)
        _write(table, args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0
