"""Per-validator DAG storage and structural queries.

A vertex is keyed by (round, source): reliable-broadcast integrity guarantees
at most one vertex per key in honest views, which lets us skip content
digests entirely. The store enforces causal completeness: a vertex is only
inserted once every parent it references is present.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .committee import Committee, ValidatorId


class VertexId(NamedTuple):
    round: int
    source: ValidatorId


@dataclass(frozen=True)
class Block:
    """Transaction payload of a vertex.

    ``txs`` holds (tx id, created-at tick) pairs; tx ids are unique per
    creating validator. ``schedule_epoch`` records which leader-schedule epoch
    the creator was on, purely as informational metadata.
    """

    txs: tuple[tuple[int, int], ...] = ()
    schedule_epoch: int = 0


@dataclass(frozen=True)
class Vertex:
    id: VertexId
    block: Block
    edges: frozenset[VertexId]
    # Denormalized from id; plain fields keep the hot paths cheap.
    round: int = field(init=False)
    source: ValidatorId = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "round", self.id.round)
        object.__setattr__(self, "source", self.id.source)


class InsertOutcome(enum.Enum):
    INSERTED = "inserted"
    MISSING_PARENTS = "missing-parents"
    DUPLICATE = "duplicate"
    MALFORMED_EDGES = "malformed-edges"


class UnknownVertex(KeyError):
    pass


class DagState:
    """One node's view of the DAG, indexed by round then source."""

    def __init__(self, committee: Committee):
        self.committee = committee
        self.by_round: dict[int, dict[ValidatorId, Vertex]] = {}
        self.highest_round = -1
        # Reverse edges, maintained on insert; used to answer "who reaches
        # this anchor" without rescanning the store.
        self._children: dict[VertexId, list[VertexId]] = {}

    def __contains__(self, vid: VertexId) -> bool:
        return vid.source in self.by_round.get(vid.round, ())

    def get(self, vid: VertexId) -> Vertex | None:
        return self.by_round.get(vid.round, {}).get(vid.source)

    def vertices_at(self, round: int) -> dict[ValidatorId, Vertex]:
        return self.by_round.get(round, {})

    def children_of(self, vid: VertexId) -> list[VertexId]:
        return self._children.get(vid, [])

    def all_vertices(self) -> Iterator[Vertex]:
        for r in sorted(self.by_round):
            for s in sorted(self.by_round[r]):
                yield self.by_round[r][s]

    def even_vertices_from(self, round: int) -> list[Vertex]:
        """Even-round vertices with round >= the given bound, (round, source) ascending."""
        out = []
        for r in sorted(self.by_round):
            if r < round or r % 2 != 0:
                continue
            for s in sorted(self.by_round[r]):
                out.append(self.by_round[r][s])
        return out

    def structurally_valid(self, v: Vertex) -> bool:
        if v.round < 0:
            return False
        if v.round == 0:
            return not v.edges
        if len(v.edges) < self.committee.quorum_threshold:
            return False
        return all(e.round == v.round - 1 for e in v.edges)

    def insert(self, v: Vertex) -> InsertOutcome:
        """Insert ``v`` if structurally valid and causally complete.

        MISSING_PARENTS means the caller should buffer and retry once the
        parents arrive; DUPLICATE signals reliable-broadcast integrity
        handling (same id already present).
        """
        if not self.structurally_valid(v):
            return InsertOutcome.MALFORMED_EDGES
        if v.id in self:
            return InsertOutcome.DUPLICATE
        if any(e not in self for e in v.edges):
            return InsertOutcome.MISSING_PARENTS
        self.by_round.setdefault(v.round, {})[v.source] = v
        for e in v.edges:
            self._children.setdefault(e, []).append(v.id)
        if v.round > self.highest_round:
            self.highest_round = v.round
        return InsertOutcome.INSERTED


def path(dag: DagState, frm: VertexId, to: VertexId) -> bool:
    """True iff an edge chain leads from ``frm`` down to ``to``.

    A single vertex counts as a chain, so ``path(v, v)`` is true. Edges drop
    exactly one round per hop, so anything at a round above ``frm`` or below
    ``to`` is unreachable and the search prunes on round.
    """
    if frm not in dag:
        raise UnknownVertex(frm)
    if frm == to:
        return True
    if to.round >= frm.round:
        return False
    frontier = [frm]
    seen = {frm}
    while frontier:
        nxt = []
        for vid in frontier:
            for e in dag.get(vid).edges:
                if e == to:
                    return True
                if e.round > to.round and e not in seen:
                    seen.add(e)
                    nxt.append(e)
        frontier = nxt
    return False


class AnchorReach:
    """Memoized reachability toward one fixed target vertex.

    Built once per commit attempt: walks the reverse-edge index upward from
    the target (bounded by ``max_round``) and answers membership queries in
    O(1). Equivalent to calling :func:`path` per query; the plain search
    stays available as the cross-check.
    """

    def __init__(self, dag: DagState, target: VertexId, max_round: int):
        self.target = target
        reached = {target}
        frontier = [target]
        while frontier:
            nxt = []
            for vid in frontier:
                for child in dag.children_of(vid):
                    if child.round <= max_round and child not in reached:
                        reached.add(child)
                        nxt.append(child)
            frontier = nxt
        self._reached = reached

    def covers(self, vid: VertexId) -> bool:
        return vid in self._reached


def causal_history(dag: DagState, anchor: VertexId, min_round: int = 0) -> set[VertexId]:
    """All vertices reachable from ``anchor`` (itself included) at round >= min_round."""
    if anchor not in dag:
        raise UnknownVertex(anchor)
    out = {anchor}
    frontier = [anchor]
    while frontier:
        nxt = []
        for vid in frontier:
            for e in dag.get(vid).edges:
                if e.round >= min_round and e not in out:
                    out.add(e)
                    nxt.append(e)
        frontier = nxt
    return out
