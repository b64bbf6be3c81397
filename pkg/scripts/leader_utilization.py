#!/usr/bin/env python3
"""Skipped anchor rounds as the horizon grows, with crashed validators.

Static rotation skips an anchor round every time a dead validator's slot
comes up, so skips grow linearly with the horizon. The reputation schedule
stops electing dead validators after one epoch, so skips stay flat.
"""

import argparse

from repdag.checks import check_leader_utilization
from repdag.config import parse_config
from repdag.simnet import run


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=10)
    ap.add_argument("--crashes", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    plan = [[args.n - 1 - i, 0] for i in range(args.crashes)]
    print(f"{'rounds':>7} {'reputation':>11} {'static':>7}   (skipped anchor rounds)")
    for rounds in (60, 120, 240, 480):
        row = []
        for mode in ("hammerhead", "round-robin"):
            cfg = parse_config(
                {
                    "stakes": [1] * args.n,
                    "mode": mode,
                    "stop": {"maxRound": rounds},
                    "Delta": 1,
                    "leaderTimeout": 6,
                    "seed": args.seed,
                    "faultPlan": plan,
                }
            )
            result = run(cfg)
            report = check_leader_utilization(result.records_by_node, {"config": cfg.to_json_dict()})
            row.append(report.skipped)
        print(f"{rounds:>7} {row[0]:>11} {row[1]:>7}")


if __name__ == "__main__":
    main()
