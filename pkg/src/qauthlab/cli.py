"""Command-line entry point: ``qauthlab run | list-schemes | list-attacks | verify-suite``."""

from __future__ import annotations

import argparse
import inspect
import sys

from .adversaries import ATTACK_CATALOG
from .runner import EXIT_PARSE, run_config
from .schemes import SCHEME_CATALOG
from .suite import INJECTIONS, verify_suite


def _seed(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return value


def _jobs(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("jobs must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qauthlab", description="Quantum authentication experiments on small Hilbert spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment configuration")
    run.add_argument("config", help="path to a JSON configuration")
    run.add_argument("--out", help="output directory (overrides the config's 'output')")
    run.add_argument("--seed", type=_seed, help="master seed (overrides the config's 'seed')")
    run.add_argument("--jobs", type=_jobs, default=1, help="worker processes")
    sub.add_parser("list-schemes", help="print the scheme catalog")
    sub.add_parser("list-attacks", help="print the attack catalog")
    verify = sub.add_parser("verify-suite", help="run the invariant battery")
    verify.add_argument("--inject", choices=INJECTIONS, help="plant a known defect")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: cannot read {args.config}: {exc.strerror}")
            return EXIT_PARSE
        return run_config(text, args.out, args.seed, args.jobs)
    if args.command == "list-schemes":
        for name, (tag, ctor, description) in SCHEME_CATALOG.items():
            params = ", ".join(inspect.signature(ctor).parameters)
            print(f"{name:20s} [{tag}] {description}; params: {params}")
        return 0
    if args.command == "list-attacks":
        for name, description in ATTACK_CATALOG.items():
            print(f"{name:26s} {description}")
        return 0
    return verify_suite(args.inject)


if __name__ == "__main__":
    sys.exit(main())
