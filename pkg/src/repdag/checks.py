"""Property checkers over completed run traces.

Each checker is read-only, reports a verdict rather than raising, and is
deliberately independent of the protocol implementation: it trusts nothing
but the persisted records.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .metrics import Records, honest_nodes


@dataclass(frozen=True)
class TotalOrderVerdict:
    ok: bool
    node_a: int | None = None
    node_b: int | None = None
    divergence_index: int | None = None

    def __str__(self) -> str:
        if self.ok:
            return "total-order: ok"
        return (
            f"total-order: violation between node {self.node_a} and node {self.node_b} "
            f"at index {self.divergence_index}"
        )


@dataclass(frozen=True)
class ScheduleAgreementVerdict:
    status: str  # ok | inconclusive | violation
    epoch: int | None = None
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def __str__(self) -> str:
        suffix = f" (epoch {self.epoch}: {self.detail})" if self.epoch is not None else ""
        return f"schedule-agreement: {self.status}{suffix}"


@dataclass(frozen=True)
class LeaderUtilizationReport:
    ok: bool
    skipped: int
    bound: int
    crashed: int
    window: tuple[int, int]

    def __str__(self) -> str:
        return (
            f"leader-utilization: {'ok' if self.ok else 'violation'} "
            f"(skipped {self.skipped} of anchor rounds {self.window[0]}..{self.window[1]}, "
            f"bound {self.bound}, crashed {self.crashed})"
        )


@dataclass(frozen=True)
class RbVerdict:
    ok: bool
    missing: tuple[tuple[int, tuple[int, int]], ...] = ()  # (node, vertex id)

    def __str__(self) -> str:
        if self.ok:
            return "reliable-broadcast: ok"
        return f"reliable-broadcast: violation, {len(self.missing)} missing deliveries"


def ordered_sequence(records: list[dict[str, Any]]) -> list[tuple[int, int]]:
    entries = [r for r in records if r["kind"] == "vertex-ordered"]
    entries.sort(key=lambda r: r["seqIndex"])
    return [tuple(r["id"]) for r in entries]


def check_total_order(records_by_node: Records) -> TotalOrderVerdict:
    """Pairwise prefix consistency of every node's ordered sequence.

    Crashed nodes simply have shorter logs; the prefix rule covers them, so
    all nodes participate.
    """
    sequences = {node: ordered_sequence(records) for node, records in records_by_node.items()}
    nodes = sorted(sequences)
    for i, a in enumerate(nodes):
        for b in nodes[i + 1 :]:
            seq_a, seq_b = sequences[a], sequences[b]
            for idx in range(min(len(seq_a), len(seq_b))):
                if seq_a[idx] != seq_b[idx]:
                    return TotalOrderVerdict(ok=False, node_a=a, node_b=b, divergence_index=idx)
    return TotalOrderVerdict(ok=True)


def check_schedule_agreement(records_by_node: Records, manifest: dict[str, Any]) -> ScheduleAgreementVerdict:
    """Same epoch means identical schedule, and nobody is left behind.

    A mismatch in (initialRound, slots) for a shared epoch is a violation. An
    epoch that some live honest node never reached is inconclusive, not a
    failure: the run may simply have been truncated first.
    """
    honest = honest_nodes(manifest)
    per_epoch: dict[int, dict[int, tuple[int, tuple[int, ...]]]] = {}
    for node, records in records_by_node.items():
        for rec in records:
            if rec["kind"] != "schedule-switched":
                continue
            per_epoch.setdefault(rec["epoch"], {})[node] = (
                rec["initialRound"],
                tuple(rec["slots"]),
            )
    for epoch in sorted(per_epoch):
        variants = set(per_epoch[epoch].values())
        if len(variants) > 1:
            return ScheduleAgreementVerdict(
                status="violation", epoch=epoch, detail="conflicting schedules recorded"
            )
    for epoch in sorted(per_epoch):
        holders = set(per_epoch[epoch]) & set(honest)
        if holders and any(node not in per_epoch[epoch] for node in honest):
            return ScheduleAgreementVerdict(
                status="inconclusive", epoch=epoch, detail="not all honest nodes reached this epoch"
            )
    return ScheduleAgreementVerdict(status="ok")


def _pre_gst_round(records_by_node: Records, honest: list[int], gst: int) -> int:
    top = 0
    for node in honest:
        for rec in records_by_node.get(node, []):
            if rec["kind"] == "round-advanced" and rec["at"] <= gst:
                top = max(top, rec["round"])
    return top


def check_leader_utilization(
    records_by_node: Records,
    manifest: dict[str, Any],
    warmup: int | None = None,
) -> LeaderUtilizationReport:
    """Skipped anchor rounds after GST stay within (T + 1) * crashed + warmup.

    An anchor round counts as skipped when no honest node ever committed that
    round's anchor, directly or through back-chaining. The window starts at
    the first anchor round past any pre-GST progress and ends at the highest
    committed anchor round, so truncation at the run horizon is not counted
    against the protocol. The default warmup constant, ceil(T / 2) + 2 anchor
    rounds, covers the epoch that was already running when the crashes hit.
    """
    cfg = manifest["config"]
    honest = honest_nodes(manifest)
    crashed = len(cfg["faultPlan"])
    span = cfg["T"]
    if warmup is None:
        warmup = (span + 1) // 2 + 2
    committed: set[int] = set()
    for node in honest:
        for rec in records_by_node.get(node, []):
            if rec["kind"] == "anchor-committed":
                committed.add(rec["round"])
    start = _pre_gst_round(records_by_node, honest, cfg["GST"]) + 1
    start = start + (start % 2)  # first even round after pre-GST progress
    start = max(start, 2)
    end = max(committed) if committed else start - 2
    skipped = sum(1 for r in range(start, end + 1, 2) if r not in committed)
    bound = (span + 1) * crashed + warmup
    return LeaderUtilizationReport(
        ok=skipped <= bound,
        skipped=skipped,
        bound=bound,
        crashed=crashed,
        window=(start, end),
    )


def _created_by(records_by_node: Records) -> dict[tuple[int, int], int]:
    created = {}
    for node, records in records_by_node.items():
        for rec in records:
            if rec["kind"] == "vertex-created":
                created[tuple(rec["id"])] = rec["at"]
    return created


def _delivered_sets(records_by_node: Records, honest: list[int]) -> dict[int, set[tuple[int, int]]]:
    return {
        node: {
            tuple(rec["id"])
            for rec in records_by_node.get(node, [])
            if rec["kind"] == "vertex-delivered"
        }
        for node in honest
    }


def check_rb_validity(records_by_node: Records, manifest: dict[str, Any]) -> RbVerdict:
    """Every vertex a never-crashed node broadcast reaches every honest node."""
    honest = honest_nodes(manifest)
    delivered = _delivered_sets(records_by_node, honest)
    missing = []
    for vid in _created_by(records_by_node):
        if vid[1] not in honest:
            continue
        for node in honest:
            if vid not in delivered[node]:
                missing.append((node, vid))
    return RbVerdict(ok=not missing, missing=tuple(missing))


def check_rb_agreement(records_by_node: Records, manifest: dict[str, Any]) -> RbVerdict:
    """A vertex delivered by one honest node is delivered by all of them."""
    honest = honest_nodes(manifest)
    delivered = _delivered_sets(records_by_node, honest)
    union: set[tuple[int, int]] = set()
    for ids in delivered.values():
        union.update(ids)
    missing = []
    for vid in sorted(union):
        for node in honest:
            if vid not in delivered[node]:
                missing.append((node, vid))
    return RbVerdict(ok=not missing, missing=tuple(missing))


def check_delivery_bound(records_by_node: Records, manifest: dict[str, Any]) -> RbVerdict:
    """First delivery at each honest node respects Delta + max(GST, send time)."""
    cfg = manifest["config"]
    honest = honest_nodes(manifest)
    created = _created_by(records_by_node)
    late = []
    for node in honest:
        first: dict[tuple[int, int], int] = {}
        for rec in records_by_node.get(node, []):
            if rec["kind"] == "vertex-delivered":
                vid = tuple(rec["id"])
                if vid not in first:
                    first[vid] = rec["at"]
        for vid, at in first.items():
            sent = created[vid]
            if at > cfg["Delta"] + max(cfg["GST"], sent):
                late.append((node, vid))
    return RbVerdict(ok=not late, missing=tuple(late))
