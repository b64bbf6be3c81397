"""The validator state machine.

One node owns one dag and one commit state. It reacts to three stimuli:
boot (create the genesis vertex), delivery of a vertex, and timer expiry.
Each handler runs to completion and returns the broadcasts and timer
requests it produced; all inter-node effects travel through the simulator.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .commit import CommitState, retro_recheck, try_committing
from .committee import Committee, ValidatorId
from .dag import Block, DagState, InsertOutcome, Vertex, VertexId
from .reputation import Schedule, ScheduleBook
from .traces import Tracer


@dataclass
class Effects:
    broadcasts: list[Vertex] = field(default_factory=list)
    timers: list[int] = field(default_factory=list)


class Node:
    """A single validator. Crash is absorbing: no actions after it."""

    def __init__(
        self,
        me: ValidatorId,
        committee: Committee,
        genesis_schedule: Schedule,
        tracer: Tracer,
        leader_timeout: int,
        batch_size: int,
        round_cap: int,
        switch_span: int | None = 10,
        exclusion_fraction: float = 0.33,
        tx_supply: Callable[[ValidatorId, int], int] | None = None,
    ):
        self.me = me
        self.committee = committee
        self.dag = DagState(committee)
        self.commit = CommitState(
            committee=committee,
            book=ScheduleBook(genesis_schedule),
            switch_span=switch_span,
            exclusion_fraction=exclusion_fraction,
        )
        self.tracer = tracer
        self.current_round = 0
        self.pending: dict[VertexId, Vertex] = {}
        self.tx_queue: deque[int] = deque()
        self.leader_wait_deadline: int | None = None
        self.crashed = False
        self.leader_timeout = leader_timeout
        self.batch_size = batch_size
        self.round_cap = round_cap
        self.tx_supply = tx_supply if tx_supply is not None else (lambda node, now: 0)
        self._next_tx_id = 0
        self._seen: set[VertexId] = set()

    # -- stimuli ---------------------------------------------------------

    def boot(self, now: int) -> Effects:
        effects = Effects()
        if self.crashed:
            return effects
        effects.broadcasts.append(self._make_vertex(0, now))
        return effects

    def on_deliver(self, v: Vertex, now: int) -> Effects:
        effects = Effects()
        if self.crashed:
            return effects
        if v.id in self._seen:
            # Reliable-broadcast integrity: duplicates change nothing and are
            # not re-forwarded.
            return effects
        self._seen.add(v.id)
        if v.source != self.me:
            # Echo on first delivery; our own vertices already went to every
            # peer in the original broadcast at this same instant.
            effects.broadcasts.append(v)
        inserted: list[Vertex] = []
        outcome = self.dag.insert(v)
        if outcome is InsertOutcome.INSERTED:
            inserted.append(v)
            self.tracer.emit("vertex-delivered", id=[v.round, v.source])
            inserted.extend(self._drain_pending())
        elif outcome is InsertOutcome.MISSING_PARENTS:
            self.pending[v.id] = v
        if inserted:
            self._commit_pass(inserted)
        self._try_advance(now, effects)
        return effects

    def on_timer(self, now: int) -> Effects:
        effects = Effects()
        if self.crashed:
            return effects
        self._try_advance(now, effects)
        return effects

    # -- internals -------------------------------------------------------

    def _drain_pending(self) -> list[Vertex]:
        drained: list[Vertex] = []
        progress = True
        while progress:
            progress = False
            for vid in sorted(self.pending):
                v = self.pending[vid]
                if self.dag.insert(v) is InsertOutcome.INSERTED:
                    del self.pending[vid]
                    drained.append(v)
                    self.tracer.emit("vertex-delivered", id=[v.round, v.source])
                    progress = True
        return drained

    def _commit_pass(self, inserted: list[Vertex]) -> None:
        inserted.sort(key=lambda v: v.id)
        for v in inserted:
            epochs_before = self.commit.book.epoch_count
            try_committing(self.commit, self.dag, v, self.tracer)
            if self.commit.book.epoch_count != epochs_before:
                retro_recheck(self.commit, self.dag, self.tracer)

    def _try_advance(self, now: int, effects: Effects) -> None:
        """Advance rounds while the quorum and leader-wait rules allow it.

        At an even round with the anchor still missing, a deadline of
        ``leader_timeout`` ticks is armed once; the round is left either when
        the anchor arrives or when the deadline passes. Odd rounds advance on
        quorum alone.
        """
        while not self.crashed and self.current_round < self.round_cap:
            held = self.dag.vertices_at(self.current_round)
            if len(held) < self.committee.quorum_threshold:
                break
            if self.current_round % 2 == 0:
                leader = self.commit.book.leader_for(self.current_round)
                if leader not in held:
                    if self.leader_wait_deadline is None:
                        self.leader_wait_deadline = now + self.leader_timeout
                        effects.timers.append(self.leader_wait_deadline)
                        break
                    if now < self.leader_wait_deadline:
                        break
                    self.tracer.emit("leader-timeout", round=self.current_round)
            effects.broadcasts.append(self._make_vertex(self.current_round + 1, now))
            self.leader_wait_deadline = None
            self.current_round += 1
            self.tracer.emit("round-advanced", round=self.current_round)

    def _make_vertex(self, round: int, now: int) -> Vertex:
        for _ in range(self.tx_supply(self.me, now)):
            self.tx_queue.append(self._next_tx_id)
            self._next_tx_id += 1
        take = min(self.batch_size, len(self.tx_queue))
        txs = tuple((self.tx_queue.popleft(), now) for _ in range(take))
        if round == 0:
            edges: frozenset[VertexId] = frozenset()
        else:
            edges = frozenset(v.id for v in self.dag.vertices_at(round - 1).values())
        v = Vertex(
            id=VertexId(round, self.me),
            block=Block(txs=txs, schedule_epoch=self.commit.book.active.epoch),
            edges=edges,
        )
        self.tracer.emit("vertex-created", id=[round, self.me], txCount=len(txs))
        return v
