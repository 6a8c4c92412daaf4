#!/usr/bin/env python3
"""Run the containment benchmark grid, write a CSV and print the regression."""
import argparse
import sys

from cherrypick.bench import BenchConfig, fit, format_fits, run_benchmark


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="bench.csv")
    ap.add_argument("--min", type=int, default=100)
    ap.add_argument("--max", type=int, default=1000)
    ap.add_argument("--step", type=int, default=100)
    ap.add_argument("--replicates", type=int, default=2)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--budget", type=float, default=540.0, help="0 disables extra passes")
    ap.add_argument("--max-passes", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args()
    cfg = BenchConfig.grid(args.min, args.max, args.step, replicates=args.replicates,
                           repeats=args.repeats, base_seed=args.seed,
                           time_budget=args.budget or None, max_passes=args.max_passes)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        records = run_benchmark(cfg, fh, workers=args.workers, progress=sys.stderr)
    print(format_fits(fit(records)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
