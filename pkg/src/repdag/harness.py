"""Scenario execution, trace persistence, and paired comparisons."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import __version__
from .config import SimConfig
from .metrics import Metrics, Records, compute_metrics
from .simnet import RunResult, run
from .traces import parse, serialize

MANIFEST_NAME = "manifest.json"


def write_run(result: RunResult, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for tracer in result.tracers:
        (out / f"node-{tracer.node:02d}.jsonl").write_text(serialize(tracer.node, tracer.records))
    manifest = {
        "config": result.config.to_json_dict(),
        "seed": result.config.seed,
        "codeVersion": __version__,
        "endTime": result.end_time,
        "eventsExecuted": result.events_executed,
        "roundsReached": {str(n.me): n.current_round for n in result.nodes},
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return out


def load_run(run_dir: str | Path) -> tuple[dict[str, Any], Records]:
    run_dir = Path(run_dir)
    manifest = json.loads((run_dir / MANIFEST_NAME).read_text())
    records: Records = {}
    for path in sorted(run_dir.glob("node-*.jsonl")):
        node, recs = parse(path.read_text())
        records[node] = recs
    return manifest, records


def run_scenario(cfg: SimConfig, out_dir: str | Path) -> tuple[Metrics, Path]:
    """Run one scenario, persist its traces, and compute metrics from them."""
    result = run(cfg)
    path = write_run(result, out_dir)
    manifest, records = load_run(path)
    metrics = compute_metrics(records, manifest)
    (path / "metrics.json").write_text(json.dumps(metrics.to_dict(), indent=2, sort_keys=True) + "\n")
    return metrics, path


def run_in_memory(cfg: SimConfig) -> tuple[Metrics, RunResult]:
    """Like run_scenario but without touching disk; used by sweeps and tests."""
    result = run(cfg)
    manifest = {"config": cfg.to_json_dict()}
    metrics = compute_metrics(result.records_by_node, manifest)
    return metrics, result


@dataclass(frozen=True)
class Comparison:
    seeds: tuple[int, ...]
    metrics_a: tuple[Metrics, ...]
    metrics_b: tuple[Metrics, ...]

    def mean(self, side: str, attr: str) -> float:
        values = [getattr(m, attr) for m in (self.metrics_a if side == "a" else self.metrics_b)]
        values = [v for v in values if v is not None]
        return statistics.fmean(values) if values else float("nan")

    def to_rows(self) -> list[dict[str, Any]]:
        rows = []
        for seed, ma, mb in zip(self.seeds, self.metrics_a, self.metrics_b):
            rows.append(
                {
                    "seed": seed,
                    "throughputA": ma.throughput,
                    "throughputB": mb.throughput,
                    "latencyAvgA": ma.latency_avg,
                    "latencyAvgB": mb.latency_avg,
                    "latencyP95A": ma.latency_p95,
                    "latencyP95B": mb.latency_p95,
                    "skippedA": ma.skipped_anchor_rounds,
                    "skippedB": mb.skipped_anchor_rounds,
                }
            )
        return rows

    def to_csv(self) -> str:
        rows = self.to_rows()
        cols = list(rows[0].keys())
        lines = [",".join(cols)]
        for row in rows:
            lines.append(",".join(str(row[c]) for c in cols))
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        lines = [
            f"{'seed':>6} {'tput A':>10} {'tput B':>10} {'lat A':>8} {'lat B':>8} {'skip A':>7} {'skip B':>7}"
        ]
        for row in self.to_rows():
            lines.append(
                f"{row['seed']:>6} {row['throughputA']:>10.4f} {row['throughputB']:>10.4f} "
                f"{_fmt(row['latencyAvgA']):>8} {_fmt(row['latencyAvgB']):>8} "
                f"{row['skippedA']:>7} {row['skippedB']:>7}"
            )
        lines.append(
            f"  mean {self.mean('a', 'throughput'):>10.4f} {self.mean('b', 'throughput'):>10.4f} "
            f"{self.mean('a', 'latency_avg'):>8.2f} {self.mean('b', 'latency_avg'):>8.2f}"
        )
        return "\n".join(lines)


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def compare(cfg_a: SimConfig, cfg_b: SimConfig, seeds: list[int]) -> Comparison:
    """Paired runs of two configs over shared seeds."""
    metrics_a = []
    metrics_b = []
    for seed in seeds:
        metrics_a.append(run_in_memory(cfg_a.with_seed(seed))[0])
        metrics_b.append(run_in_memory(cfg_b.with_seed(seed))[0])
    return Comparison(seeds=tuple(seeds), metrics_a=tuple(metrics_a), metrics_b=tuple(metrics_b))


def sweep(
    base: SimConfig,
    sizes: list[int],
    fault_counts: list[int],
    spans: list[int],
    seeds: list[int],
) -> list[dict[str, Any]]:
    """Grid of runs over committee size, crash count, and epoch length."""
    rows = []
    for n in sizes:
        for c in fault_counts:
            f = (n - 1) // 3
            if c > f:
                continue
            for span in spans:
                for seed in seeds:
                    cfg = SimConfig(
                        **{
                            **base.to_kwargs(),
                            "stakes": tuple([1] * n),
                            "slot_length": n,
                            "commits_per_epoch": span,
                            "fault_plan": tuple((n - 1 - i, base.gst) for i in range(c)),
                            "seed": seed,
                            "batch_size": max(1, n * base.tx_rate_per_node),
                        }
                    )
                    metrics, _ = run_in_memory(cfg)
                    rows.append(
                        {
                            "n": n,
                            "faults": c,
                            "T": span,
                            "seed": seed,
                            "mode": cfg.mode,
                            **metrics.to_dict(),
                        }
                    )
    return rows


def rows_to_csv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return "\n"
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(str(row[c]) for c in cols))
    return "\n".join(lines) + "\n"
