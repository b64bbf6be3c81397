"""Trace records: the persisted per-node audit log.

One JSON object per line, preceded by a versioned header line. Field names
are frozen; times are integer ticks. Everything the metrics and property
checkers need is recomputable from these files alone.
"""

from __future__ import annotations

import json
from typing import Any

from .committee import ValidatorId

TRACE_FORMAT = "repdag-trace"
TRACE_VERSION = 1

RECORD_KINDS = (
    "vertex-created",
    "vertex-delivered",
    "round-advanced",
    "leader-timeout",
    "anchor-committed",
    "vertex-ordered",
    "schedule-switched",
)


class Tracer:
    """Per-node record sink. ``now`` is kept current by the event loop."""

    def __init__(self, node: ValidatorId):
        self.node = node
        self.now = 0
        self.records: list[dict[str, Any]] = []

    def emit(self, kind: str, **payload: Any) -> None:
        rec = {"at": self.now, "node": self.node, "kind": kind}
        rec.update(payload)
        self.records.append(rec)


def header_line(node: ValidatorId) -> str:
    return json.dumps(
        {"format": TRACE_FORMAT, "version": TRACE_VERSION, "node": node},
        separators=(",", ":"),
    )


def serialize(node: ValidatorId, records: list[dict[str, Any]]) -> str:
    lines = [header_line(node)]
    lines.extend(json.dumps(r, separators=(",", ":")) for r in records)
    return "\n".join(lines) + "\n"


def parse(text: str) -> tuple[ValidatorId, list[dict[str, Any]]]:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty trace file")
    header = json.loads(lines[0])
    if header.get("format") != TRACE_FORMAT or header.get("version") != TRACE_VERSION:
        raise ValueError(f"unrecognized trace header: {lines[0]!r}")
    return header["node"], [json.loads(line) for line in lines[1:]]
