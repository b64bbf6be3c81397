"""Deterministic discrete-event network simulator.

Partial synchrony: any message sent at time x arrives by Delta + max(GST, x).
Before GST the adversary policy decides delays (either held until GST or a
seeded random delay, clamped to the bound); after GST delays are seeded
uniform in [1, Delta]. Time is integer ticks, events execute in (time, seq)
order, and the whole run is a pure function of the config, so identical
configs give bit-identical traces.
"""

from __future__ import annotations

import heapq
import random
from bisect import bisect_right
from dataclasses import dataclass
from typing import Any, NamedTuple

from .committee import Committee, ValidatorId, new_committee
from .config import SimConfig
from .dag import Vertex
from .node import Node
from .reputation import initial_schedule
from .traces import Tracer

# Event kinds; crash sorts before boot at equal (time, seq) by construction,
# because fault-plan events are enqueued first.
CRASH, BOOT, DELIVER, TIMER = 0, 1, 2, 3
_KIND_NAMES = {CRASH: "crash", BOOT: "boot", DELIVER: "deliver", TIMER: "timer"}


class SimEvent(NamedTuple):
    at: int
    seq: int
    kind: int
    target: ValidatorId
    vertex: Vertex | None
    sender: ValidatorId | None

    @property
    def kind_name(self) -> str:
        return _KIND_NAMES[self.kind]


class ClientPool:
    """Constant offered load under crashes.

    Each validator carries one client producing ``rate`` transactions per
    vertex it creates. A crashed validator's client re-attaches to the next
    live validator by id, so the system-wide injection rate stays n * rate
    per round regardless of faults.
    """

    def __init__(self, committee: Committee, fault_plan: tuple[tuple[int, int], ...], rate: int):
        self.n = committee.n
        self.rate = rate
        self.crash_at = {v: t for v, t in fault_plan}
        # Attachment counts only change when somebody crashes; precompute one
        # table per regime between crash times.
        self._cut_times = sorted(set(t for _, t in fault_plan))
        self._tables: list[list[int]] = []
        for i in range(len(self._cut_times) + 1):
            now = (self._cut_times[i - 1] if i else -1)
            self._tables.append(self._attachment_counts(now))

    def _alive(self, v: ValidatorId, now: int) -> bool:
        return v not in self.crash_at or self.crash_at[v] > now

    def _attachment_counts(self, now: int) -> list[int]:
        counts = [0] * self.n
        for client in range(self.n):
            for hop in range(self.n):
                candidate = (client + hop) % self.n
                if self._alive(candidate, now):
                    counts[candidate] += 1
                    break
        return counts

    def supply(self, node: ValidatorId, now: int) -> int:
        if self.rate == 0:
            return 0
        regime = bisect_right(self._cut_times, now)
        return self._tables[regime][node] * self.rate


@dataclass
class RunResult:
    config: SimConfig
    committee: Committee
    nodes: list[Node]
    tracers: list[Tracer]
    end_time: int
    events_executed: int

    @property
    def records_by_node(self) -> dict[ValidatorId, list[dict[str, Any]]]:
        return {t.node: t.records for t in self.tracers}


class Simulation:
    """Single-threaded event loop owning every node state."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.committee = new_committee(list(cfg.stakes))
        genesis = initial_schedule(self.committee, cfg.seed, cfg.slot_length)
        self.rng = random.Random(cfg.seed)
        self.pool = ClientPool(self.committee, cfg.fault_plan, cfg.tx_rate_per_node)
        self.tracers = [Tracer(v) for v in self.committee.members]
        round_cap = cfg.max_round if cfg.max_round is not None else 10**9
        self.nodes = [
            Node(
                me=v,
                committee=self.committee,
                genesis_schedule=genesis,
                tracer=self.tracers[v],
                leader_timeout=cfg.leader_timeout,
                batch_size=cfg.batch_size,
                round_cap=round_cap,
                switch_span=cfg.switch_span,
                exclusion_fraction=cfg.exclusion_fraction,
                tx_supply=self.pool.supply,
            )
            for v in self.committee.members
        ]
        self.now = 0
        self.events_executed = 0
        self._seq = 0
        self._queue: list[SimEvent] = []
        for validator, crash_at in cfg.fault_plan:
            self._push(crash_at, CRASH, validator, None, None)
        for v in self.committee.members:
            self._push(0, BOOT, v, None, None)

    def _push(self, at: int, kind: int, target: int, vertex: Vertex | None, sender: int | None) -> None:
        heapq.heappush(self._queue, SimEvent(at, self._seq, kind, target, vertex, sender))
        self._seq += 1

    def next_event_at(self) -> int | None:
        return self._queue[0].at if self._queue else None

    def _delivery_time(self, now: int) -> int:
        gst, delta = self.cfg.gst, self.cfg.delta
        rand = self.rng.random
        if now >= gst:
            return now + 1 + int(rand() * delta)
        if self.cfg.pre_gst_policy == "hold":
            return gst + 1 + int(rand() * delta)
        pre_max = int(self.cfg.pre_gst_policy.split(":", 1)[1])
        held = max(gst, now + 1 + int(rand() * max(1, pre_max)))
        # The adversary may stretch delivery, never past the synchrony bound.
        return min(held + 1 + int(rand() * delta), gst + delta)

    def broadcast(self, sender: ValidatorId, v: Vertex, now: int) -> None:
        push, seq = heapq.heappush, self._seq
        queue = self._queue
        for peer in self.committee.members:
            at = now if peer == sender else self._delivery_time(now)
            push(queue, SimEvent(at, seq, DELIVER, peer, v, sender))
            seq += 1
        self._seq = seq

    def step(self) -> SimEvent | None:
        if not self._queue:
            return None
        ev = heapq.heappop(self._queue)
        self.now = ev.at
        self.events_executed += 1
        node = self.nodes[ev.target]
        if ev.kind == CRASH:
            node.crashed = True
            return ev
        if node.crashed:
            # Deliveries and timers to crashed nodes are dropped at execution.
            return ev
        self.tracers[ev.target].now = ev.at
        if ev.kind == DELIVER:
            effects = node.on_deliver(ev.vertex, ev.at)
        elif ev.kind == TIMER:
            effects = node.on_timer(ev.at)
        elif ev.kind == BOOT:
            effects = node.boot(ev.at)
        else:
            raise AssertionError(f"unknown event kind {ev.kind}")
        if effects.broadcasts:
            for v in effects.broadcasts:
                self.broadcast(ev.target, v, ev.at)
        for deadline in effects.timers:
            self._push(deadline, TIMER, ev.target, None, None)
        return ev


def run(cfg: SimConfig) -> RunResult:
    """Execute a scenario to its stop condition.

    A max-round stop caps vertex creation and then drains the event queue, so
    every in-flight message still lands and laggards converge. A max-time
    stop cuts the run at the first event past the deadline.
    """
    sim = Simulation(cfg)
    if cfg.max_time is not None:
        while sim._queue and sim._queue[0].at <= cfg.max_time:
            sim.step()
    else:
        while sim._queue:
            sim.step()
    return RunResult(
        config=cfg,
        committee=sim.committee,
        nodes=sim.nodes,
        tracers=sim.tracers,
        end_time=sim.now,
        events_executed=sim.events_executed,
    )
