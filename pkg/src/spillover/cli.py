"""Command line entry point: ``spillover static|dynamic|diagnostics``."""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import SpilloverError
from .pipeline import load_config, run_diagnostics, run_dynamic, run_static

RUNNERS = {"static": run_static, "dynamic": run_dynamic, "diagnostics": run_diagnostics}


def _lag(value: str):
    if value == "aic":
        return value
    try:
        lag = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("lag must be a positive integer or 'aic'") from None
    if lag < 1:
        raise argparse.ArgumentTypeError("lag must be positive")
    return lag


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spillover", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--horizon", type=int, help="forecast horizon H")
        p.add_argument("--lag", type=_lag, help="VAR lag order or 'aic'")
        p.add_argument("--out", dest="out_dir", help="output directory")
        p.add_argument("--seed", type=int, help="recorded in the run report; no step is random")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(
            args.config, horizon=args.horizon, lag=args.lag, out_dir=args.out_dir, seed=args.seed
        )
        report = RUNNERS[args.command](config)
    except SpilloverError as exc:
        print(f"spillover {args.command}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"spillover {args.command}: {exc}", file=sys.stderr)
        return 2
    for item in report.outputs:
        print(f"{report.out_dir}/{item['path']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
