"""trace-export command line: `export --model <id> --prompt <text> --steps <T> --seed <n> --out <path>`."""

from __future__ import annotations

import argparse
import sys

from trace_exporter.export import export
from trace_exporter.format import TraceError
from trace_exporter.pipelines import PipelineLoadError


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="trace-export")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("export", help="capture a pipeline run into a trace file")
    p.add_argument("--model", required=True, help="pipeline id (toy:flow, toy:flow-64, or a diffusers id)")
    p.add_argument("--prompt", default="")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    args = parser.parse_args(argv)
    try:
        summary = export(args.model, args.prompt, args.steps, args.seed, args.out)
    except (PipelineLoadError, TraceError) as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return 1
    print(
        f"wrote {summary['trace']}: T={summary['T']} d={summary['d']} "
        f"parameterization={summary['parameterization']} (sidecar {summary['sidecar']})"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
