"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from zeus_ode import harness
from zeus_ode.errors import ConfigError, TraceDesyncError, TraceFormatError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="zeus-ode")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="baseline + accelerated runs per seed")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)

    p_sweep = sub.add_parser("sweep", help="cross-product runs over one axis")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--axis", required=True)
    p_sweep.add_argument("--values", required=True, help="comma-separated values")
    p_sweep.add_argument("--out", required=True)

    p_verify = sub.add_parser("verify", help="run the numerical verification suites")
    p_verify.add_argument("--suite", default="all", choices=harness.SUITES)
    p_verify.add_argument("--out", required=True)

    p_replay = sub.add_parser("replay", help="replay a recorded trace")
    p_replay.add_argument("--trace", required=True)
    p_replay.add_argument("--config", required=True)
    p_replay.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            summary = harness.run(harness.load_config(args.config), args.out)
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0
        if args.command == "sweep":
            config = harness.load_config(args.config)
            values = [v.strip() for v in args.values.split(",") if v.strip()]
            summary = harness.sweep(config, args.axis, values, args.out)
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0
        if args.command == "replay":
            config = harness.load_config(args.config)
            summary = harness.replay(args.trace, config, args.out)
            print(json.dumps(summary, indent=2, sort_keys=True))
            return 0
        passed, report = harness.verify(args.suite, args.out)
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        print(f"suite={args.suite}: {len(report['checks'])} checks, "
              f"{len(report['checks']) - len(failed)} passed")
        for name in failed:
            print(f"FAILED: {name}")
        return 0 if passed else 1
    except (ConfigError, TraceFormatError, TraceDesyncError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
