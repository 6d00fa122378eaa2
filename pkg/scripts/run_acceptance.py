"""Run every config in configs/ through the harness and print one line per run."""
import argparse
import sys
import time
from pathlib import Path

from bbm_modlab.harness import run_config

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--outdir", type=Path, default=ROOT / "runs")
    ap.add_argument("configs", nargs="*", type=Path, help="defaults to configs/*.json")
    args = ap.parse_args()
    paths = args.configs or sorted((ROOT / "configs").glob("*.json"))
    worst = 0
    for path in paths:
        start = time.perf_counter()
        out = run_config(path, args.outdir)
        verdict = "PASS" if out.status == 0 else f"FAIL({out.status})"
        print(f"{path.name:32s} {verdict:9s} {time.perf_counter() - start:7.1f}s  {out.run_dir or out.message}")
        worst = max(worst, out.status)
    return worst


if __name__ == "__main__":
    sys.exit(main())
