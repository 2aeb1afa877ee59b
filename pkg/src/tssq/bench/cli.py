"""Command line entry point: ``tssq run <prototype|filament|starfish> [options]``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from ..errors import TSSQError
from .experiments import EXPERIMENTS, ExperimentConfig, run
from .output import csv_text, emit_csv, emit_summary

EXIT_OK = 0
EXIT_ORACLE = 2
EXIT_CONFIG = 3


class _ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # usage errors are configuration errors, not argparse's default status 2
        self.print_usage(sys.stderr)
        raise _ConfigError(message)


def parse_distances(text: str) -> tuple[float, ...]:
    """``LO:HI:COUNT`` as COUNT log-spaced values from LO to HI."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise _ConfigError(f"--distances expects LO:HI:COUNT, got {text!r}") from None
    if not (lo > 0 and hi > 0 and count >= 1):
        raise _ConfigError("--distances needs positive LO, HI and COUNT")
    if count == 1:
        return (lo,)
    return tuple(float(v) for v in np.logspace(np.log10(lo), np.log10(hi), count))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tssq", description="Translated singularity swap quadrature experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run one experiment and write its error records")
    r.add_argument("experiment", choices=EXPERIMENTS)
    r.add_argument("--tol", type=float, help="cancellation threshold for switching basis")
    r.add_argument("--eps", type=float, help="panelization tolerance (filament)")
    r.add_argument("--n", type=int, help="Gauss-Legendre order, panel order or global node count")
    r.add_argument("--delta", type=float, help="numerator offset of the prototype integral")
    r.add_argument("--distances", help="LO:HI:COUNT log-spaced distances (b for the prototype)")
    r.add_argument("--targets", type=int, help="targets per distance")
    r.add_argument("--seed", type=int, help="seed of the target generator")
    r.add_argument("--out", help="CSV path (default: standard output)")
    r.add_argument("--method", choices=("ssq", "tssq", "both"), help="methods to report")
    r.add_argument("--ablate-d1", action="store_true", help="prototype: add the uncorrected constant term")
    r.add_argument("--quiet", action="store_true", help="no progress or summary on standard error")
    return p


def config_from_args(args) -> ExperimentConfig:
    over = {}
    for name, field in (("tol", "tol"), ("eps", "eps_panel"), ("n", "n"), ("delta", "delta"),
                        ("targets", "targets_per_distance"), ("seed", "seed"), ("method", "method")):
        value = getattr(args, name)
        if value is not None:
            over[field] = value
    if args.distances is not None:
        over["distances"] = parse_distances(args.distances)
    if args.ablate_d1:
        over["ablate_d1"] = True
    try:
        return ExperimentConfig.defaults(args.experiment, **over)
    except (TypeError, ValueError) as exc:
        raise _ConfigError(str(exc)) from None


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
    except _ConfigError as exc:
        print(f"tssq: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    progress = None if args.quiet else (lambda msg: print(msg, file=sys.stderr, flush=True))
    try:
        records = run(cfg, progress)
    except TSSQError as exc:
        print(f"tssq: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ORACLE if "Oracle" in type(exc).__name__ else 1
    if args.out:
        emit_csv(records, args.out)
    else:
        sys.stdout.write(csv_text(records))
    if not args.quiet:
        print(emit_summary(records), file=sys.stderr)
    if records and not any(r.oracle_ok for r in records):
        return EXIT_ORACLE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
