"""Command-line entry point.

Subcommands select which analyses to run on the bundle described by a JSON
config file; ``validate`` only checks the bundle, ``all`` runs everything.
Exit codes: 0 success, 1 validation failure, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys

from .corpus import InputError, validate_bundle
from .pipeline import ANALYSES, RunConfig, ValidationFailure, load_bundle, run

SUBCOMMANDS = {
    "validate": None,
    "similarity": ("similarity",),
    "fluency": ("fluency",),
    "reorder": ("reordering",),
    "length": ("length",),
    "errcats": ("errcats",),
    "overall": ("overall",),
    "all": ANALYSES,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtfacets",
        description="Multifaceted comparison of machine-translation outputs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="JSON run config")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--iterations", type=int, default=None)
        cmd.add_argument("--alpha", type=float, default=None)
        cmd.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_file(args.config)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        config.seed = args.seed
    if args.iterations is not None:
        config.iterations = args.iterations
    if args.alpha is not None:
        config.alpha = args.alpha
    if args.out is not None:
        config.out = args.out

    if args.command == "validate":
        try:
            bundle = load_bundle(config)
        except InputError as exc:
            print(f"validation failure: {exc}", file=sys.stderr)
            return 1
        violations = validate_bundle(bundle, config.analyses)
        if violations:
            for v in violations:
                print(f"violation: {v}", file=sys.stderr)
            return 1
        print("bundle is valid")
        return 0

    config.analyses = SUBCOMMANDS[args.command]
    try:
        report = run(config)
    except (ValidationFailure, InputError) as exc:
        if isinstance(exc, ValidationFailure):
            for v in exc.violations:
                print(f"violation: {v}", file=sys.stderr)
        else:
            print(f"validation failure: {exc}", file=sys.stderr)
        return 1
    if report["failed"]:
        for analysis, message in report["failed"].items():
            print(f"analysis {analysis} failed: {message}", file=sys.stderr)
        return 2
    print(f"reports written to {config.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
