#!/usr/bin/env python3
"""Faultless comparison of reputation scheduling against static rotation.

Runs paired seeds of both modes on an n-validator committee with no crashes
and prints per-seed throughput and latency. Expected outcome: parity in
throughput, latency equal or slightly better for the reputation mode.
"""

import argparse

from repdag.config import parse_config
from repdag.harness import compare


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--rounds", type=int, default=240)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    base = {
        "stakes": [1] * args.n,
        "stop": {"maxRound": args.rounds},
        "Delta": 1,
        "leaderTimeout": 6,
        "txRatePerNode": 2,
        "batchSize": 2 * args.n,
    }
    hh = parse_config(base)
    rr = parse_config({**base, "mode": "round-robin"})
    comparison = compare(hh, rr, list(range(args.seeds)))
    print("A = reputation scheduling, B = static rotation (faultless)")
    print(comparison.summary())


if __name__ == "__main__":
    main()
