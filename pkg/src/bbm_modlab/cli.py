"""Command line entry point: ``bbm-modlab run|list|schema``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import EXIT_CONFIG, SCHEMA, list_experiments, run_config


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="bbm-modlab",
                                     description="Numerical experiments for the generalized BBM equation.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one experiment config")
    run.add_argument("config", type=Path)
    run.add_argument("--outdir", type=Path, default=None,
                     help="output root (overrides the config and the BBM_MODLAB_OUTDIR variable)")
    sub.add_parser("list", help="list experiments and estimate kinds")
    sub.add_parser("schema", help="print the config JSON schema")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else 0

    if args.command == "list":
        sys.stdout.write(list_experiments())
        return 0
    if args.command == "schema":
        sys.stdout.write(json.dumps(SCHEMA, indent=2, sort_keys=True) + "\n")
        return 0

    out = run_config(args.config, outdir=args.outdir)
    if out.message:
        print(out.message, file=sys.stderr)
    if out.run_dir is not None:
        failed = [k for k, v in out.summary.get("checks", {}).items() if not v]
        verdict = "PASS" if out.status == 0 else f"FAIL (exit {out.status})"
        print(f"{out.summary['experiment']}: {verdict} -> {out.run_dir}")
        for name in failed:
            print(f"  failed: {name}")
    return out.status


if __name__ == "__main__":
    raise SystemExit(main())
