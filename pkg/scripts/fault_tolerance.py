#!/usr/bin/env python3
"""Throughput and latency under the maximum tolerable number of crashes.

For each seed, runs both modes with f validators crashed from the start and
reports the degradation relative to that mode's own faultless baseline.
Static rotation keeps electing dead leaders and pays the timeout every
cycle; the reputation schedule swaps them out after the first epoch.
"""

import argparse
import statistics

from repdag.config import parse_config
from repdag.harness import run_in_memory


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--crashes", type=int, default=None, help="default: the fault bound f")
    ap.add_argument("--rounds", type=int, default=400)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    f = (args.n - 1) // 3
    crashes = f if args.crashes is None else args.crashes
    plan = [[args.n - 1 - i, 0] for i in range(crashes)]
    base = {
        "stakes": [1] * args.n,
        "stop": {"maxRound": args.rounds},
        "Delta": 1,
        "leaderTimeout": 6,
        "txRatePerNode": 2,
        "batchSize": 2 * args.n,
    }

    print(f"n={args.n}, {crashes} crashes at t=0, {args.rounds} rounds")
    print(f"{'mode':>12} {'seed':>5} {'tput':>8} {'vs faultless':>13} {'latency':>8}")
    ratios = {"hammerhead": [], "round-robin": []}
    for mode in ("hammerhead", "round-robin"):
        for seed in range(args.seeds):
            clean, _ = run_in_memory(parse_config({**base, "mode": mode, "seed": seed}))
            faulty, _ = run_in_memory(parse_config({**base, "mode": mode, "seed": seed, "faultPlan": plan}))
            ratio = faulty.throughput / clean.throughput
            ratios[mode].append(ratio)
            print(
                f"{mode:>12} {seed:>5} {faulty.throughput:>8.3f} {ratio:>12.1%} "
                f"{faulty.latency_avg:>8.2f}"
            )
    for mode, values in ratios.items():
        print(f"{mode}: mean retained throughput {statistics.fmean(values):.1%}")


if __name__ == "__main__":
    main()
