"""Command-line interface.

Exit codes: 0 on success, 1 when a property checker reports a violation,
2 on configuration or IO errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checks import (
    check_leader_utilization,
    check_rb_agreement,
    check_rb_validity,
    check_schedule_agreement,
    check_total_order,
)
from .config import ConfigInvalid, SimConfig, load_config
from .harness import compare, load_run, rows_to_csv, run_scenario, sweep


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    metrics, path = run_scenario(cfg, args.out)
    print(f"run complete: traces in {path}")
    for key, value in metrics.to_dict().items():
        print(f"  {key}: {value}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    manifest, records = load_run(args.trace)
    wanted = []
    if args.all or args.total_order:
        wanted.append(("total-order", lambda: check_total_order(records)))
    if args.all or args.schedules:
        wanted.append(("schedules", lambda: check_schedule_agreement(records, manifest)))
    if args.all or args.utilization:
        wanted.append(("utilization", lambda: check_leader_utilization(records, manifest)))
    if args.all:
        wanted.append(("rb-validity", lambda: check_rb_validity(records, manifest)))
        wanted.append(("rb-agreement", lambda: check_rb_agreement(records, manifest)))
    if not wanted:
        wanted = [
            ("total-order", lambda: check_total_order(records)),
            ("schedules", lambda: check_schedule_agreement(records, manifest)),
            ("utilization", lambda: check_leader_utilization(records, manifest)),
            ("rb-validity", lambda: check_rb_validity(records, manifest)),
            ("rb-agreement", lambda: check_rb_agreement(records, manifest)),
        ]
    failed = False
    for name, runner in wanted:
        verdict = runner()
        print(str(verdict))
        if not verdict.ok and getattr(verdict, "status", None) != "inconclusive":
            failed = True
    return 1 if failed else 0


def _cmd_compare(args: argparse.Namespace) -> int:
    cfg_a = load_config(args.a)
    cfg_b = load_config(args.b)
    comparison = compare(cfg_a, cfg_b, list(range(args.seeds)))
    print(comparison.summary())
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "comparison.csv").write_text(comparison.to_csv())
        print(f"wrote {out / 'comparison.csv'}")
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    base = load_config(args.config) if args.config else SimConfig(stakes=(1, 1, 1, 1), slot_length=4, batch_size=8)
    rows = sweep(
        base,
        sizes=[int(x) for x in args.n.split(",")],
        fault_counts=[int(x) for x in args.faults.split(",")],
        spans=[int(x) for x in args.T.split(",")],
        seeds=list(range(args.seeds)),
    )
    csv_text = rows_to_csv(rows)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "sweep.csv").write_text(csv_text)
        print(f"wrote {out / 'sweep.csv'} ({len(rows)} rows)")
    else:
        print(csv_text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repdag", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario and persist traces")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", required=True)
    p_run.set_defaults(func=_cmd_run)

    p_check = sub.add_parser("check", help="run property checkers over a trace directory")
    p_check.add_argument("--trace", required=True)
    p_check.add_argument("--all", action="store_true")
    p_check.add_argument("--total-order", action="store_true", dest="total_order")
    p_check.add_argument("--schedules", action="store_true")
    p_check.add_argument("--utilization", action="store_true")
    p_check.set_defaults(func=_cmd_check)

    p_cmp = sub.add_parser("compare", help="paired runs of two configs over shared seeds")
    p_cmp.add_argument("--a", required=True)
    p_cmp.add_argument("--b", required=True)
    p_cmp.add_argument("--seeds", type=int, default=5)
    p_cmp.add_argument("--out")
    p_cmp.set_defaults(func=_cmd_compare)

    p_sweep = sub.add_parser("sweep", help="grid of runs over n, fault count, and epoch length")
    p_sweep.add_argument("--config", help="base config; defaults apply if omitted")
    p_sweep.add_argument("--n", default="4,7,10")
    p_sweep.add_argument("--faults", default="0,1")
    p_sweep.add_argument("--T", default="10")
    p_sweep.add_argument("--seeds", type=int, default=3)
    p_sweep.add_argument("--out")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, FileNotFoundError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
