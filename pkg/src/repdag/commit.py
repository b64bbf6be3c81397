"""The ordering engine: direct commits, anchor back-chaining, history
ordering, and schedule-switch triggering.

Commit decisions depend only on dag content plus the schedule book, both of
which all honest nodes agree on (eventually for content, by induction for the
book), so replicas produce identical commit logs no matter how deliveries
interleave.

The delicate part is a schedule switch that lands in the middle of draining
the anchor stack. Anchors still on the stack live at rounds the new schedule
now governs, so each one is re-validated against the current book before it
is ordered and silently discarded if its round's leader changed. Discards do
not advance ``last_ordered_round``; otherwise the new leader's vertex for a
discarded round could never be committed retroactively and replicas that
switched earlier would diverge.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .committee import Committee
from .dag import AnchorReach, DagState, Vertex, VertexId, path
from .reputation import (
    ScheduleBook,
    ScheduleChange,
    build_next_schedule,
    compute_scores,
    get_anchor,
)
from .traces import Tracer


class PrematureScheduleSwitch(ValueError):
    pass


@dataclass
class CommitState:
    """Per-node ordering state. Never shared across nodes."""

    committee: Committee
    book: ScheduleBook
    switch_span: int | None = 10
    exclusion_fraction: float = 0.33
    ordered: set[VertexId] = field(default_factory=set)
    last_ordered_round: int = 0
    commit_log: list[tuple[int, VertexId, int]] = field(default_factory=list)
    anchor_stack: list[tuple[Vertex, bool]] = field(default_factory=list)
    discarded_anchors: list[VertexId] = field(default_factory=list)

    @property
    def active_schedule(self):
        return self.book.active


def try_committing(state: CommitState, dag: DagState, v: Vertex, tracer: Tracer) -> int | None:
    """Direct-commit check for a freshly inserted vertex.

    Returns the anchor round when at least f+1 of the vertex's parents have a
    path to the anchor two rounds below, else None. Odd and genesis rounds
    never commit anything.
    """
    if v.round % 2 == 1 or v.round == 0:
        return None
    anchor = get_anchor(dag, state.book, v.round - 2)
    if anchor is None:
        return None
    reach = AnchorReach(dag, anchor.id, max_round=v.round - 1)
    votes = sum(1 for parent in v.edges if reach.covers(parent))
    if votes < state.committee.commit_threshold:
        return None
    order_anchors(state, dag, anchor, tracer)
    return anchor.round


def order_anchors(state: CommitState, dag: DagState, anchor: Vertex, tracer: Tracer) -> None:
    """Chain backwards from a directly committed anchor and order everything.

    Walks even rounds below the anchor down to the last ordered round,
    stacking every prior anchor reachable from the newest element of the
    chain. Anchors at or below the last ordered round are stale: a concurrent
    direct commit already covered them, so they are dropped with a trace
    record only.
    """
    if anchor.round <= state.last_ordered_round:
        tracer.emit("stale-anchor", round=anchor.round)
        return
    state.anchor_stack.append((anchor, True))
    tip = anchor
    r = anchor.round - 2
    while r > state.last_ordered_round:
        prev = get_anchor(dag, state.book, r)
        if prev is not None and path(dag, tip.id, prev.id):
            state.anchor_stack.append((prev, False))
            tip = prev
        r -= 2
    order_history(state, dag, tracer)


def order_history(state: CommitState, dag: DagState, tracer: Tracer) -> list[VertexId]:
    """Drain the anchor stack oldest-first, ordering each causal history.

    Every anchor is re-validated against the current book right before it is
    ordered (see module docstring). After ordering, the anchor may trigger a
    schedule switch; draining then continues under the new schedule.
    """
    newly_ordered: list[VertexId] = []
    while state.anchor_stack:
        anchor, direct = state.anchor_stack.pop()
        if state.book.leader_for(anchor.round) != anchor.source:
            state.discarded_anchors.append(anchor.id)
            continue
        if anchor.round <= state.last_ordered_round:
            continue
        for vid in _unordered_history(dag, anchor.id, state.ordered):
            seq = len(state.commit_log)
            state.commit_log.append((seq, vid, anchor.round))
            state.ordered.add(vid)
            newly_ordered.append(vid)
            tracer.emit("vertex-ordered", id=[vid.round, vid.source], seqIndex=seq)
        state.last_ordered_round = anchor.round
        tracer.emit("anchor-committed", round=anchor.round, leader=anchor.source, direct=direct)
        active = state.book.active
        if state.switch_span is not None and active.initial_round + state.switch_span <= anchor.round:
            change = update_schedule(state, dag, anchor)
            state.book.append(change.schedule)
            tracer.emit(
                "schedule-switched",
                epoch=change.schedule.epoch,
                initialRound=change.schedule.initial_round,
                slots=list(change.schedule.slots),
                scores={str(v): p for v, p in sorted(change.scores.points.items())},
            )
    return newly_ordered


def _unordered_history(dag: DagState, anchor: VertexId, ordered: set[VertexId]) -> list[VertexId]:
    # Ordered vertices are downward closed (histories are ordered atomically),
    # so the walk can stop at the first ordered ancestor.
    if anchor in ordered:
        return []
    found = {anchor}
    frontier = [anchor]
    while frontier:
        nxt = []
        for vid in frontier:
            for e in dag.get(vid).edges:
                if e not in ordered and e not in found:
                    found.add(e)
                    nxt.append(e)
        frontier = nxt
    return sorted(found)


def update_schedule(state: CommitState, dag: DagState, anchor: Vertex) -> ScheduleChange:
    """Score the closing epoch and build its successor schedule.

    Scores cover rounds from the active schedule's start up to, but not
    including, the triggering anchor's round. The successor takes effect at
    the next anchor round after the trigger.
    """
    active = state.book.active
    if state.switch_span is None or anchor.round < active.initial_round + state.switch_span:
        raise PrematureScheduleSwitch(
            f"anchor round {anchor.round} precedes the switch point "
            f"{active.initial_round} + {state.switch_span}"
        )
    scores = compute_scores(dag, state.book, active.initial_round, anchor.round)
    return build_next_schedule(
        active,
        scores,
        state.committee,
        exclusion_fraction=state.exclusion_fraction,
        initial_round=anchor.round + 2,
    )


def retro_recheck(state: CommitState, dag: DagState, tracer: Tracer) -> list[int]:
    """Re-run the commit rule after a schedule switch changed leaders.

    Vertices already in the dag at rounds the new schedule governs may now
    certify a different anchor, so each even-round vertex above the switch
    point gets another pass. A pass can itself switch schedules, in which
    case the sweep restarts from the newer switch point.
    """
    committed: list[int] = []
    while True:
        epochs_before = state.book.epoch_count
        start = state.book.active.initial_round
        for v in dag.even_vertices_from(max(start, 2)):
            before = state.last_ordered_round
            r = try_committing(state, dag, v, tracer)
            if r is not None and r > before and state.last_ordered_round >= r:
                committed.append(r)
        if state.book.epoch_count == epochs_before:
            return committed
