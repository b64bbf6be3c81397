import random

import pytest

from repdag.commit import CommitState, retro_recheck, try_committing
from repdag.committee import Committee, new_committee
from repdag.config import parse_config
from repdag.dag import Block, DagState, InsertOutcome, Vertex, VertexId
from repdag.reputation import Schedule, ScheduleBook, initial_schedule
from repdag.simnet import run
from repdag.traces import Tracer


@pytest.fixture
def committee4() -> Committee:
    return new_committee([1, 1, 1, 1])


def mk_vertex(round, source, edges=()):
    return Vertex(id=VertexId(round, source), block=Block(), edges=frozenset(edges))


def full_dag(committee, rounds, absent=frozenset()):
    """Fully connected dag: every validator in every round unless absent,
    edges to every vertex of the previous round."""
    dag = DagState(committee)
    prev_ids = []
    for r in range(rounds + 1):
        ids = []
        for s in committee.members:
            if (r, s) in absent:
                continue
            v = mk_vertex(r, s, prev_ids if r else [])
            assert dag.insert(v) is InsertOutcome.INSERTED
            ids.append(v.id)
        prev_ids = ids
    return dag


def random_dag_vertices(rng: random.Random, committee, max_rounds):
    """Random small dag in topological order; each round keeps at least
    quorum-many vertices so the next round can reference them."""
    quorum = committee.quorum_threshold
    vertices = []
    prev = []
    for r in range(max_rounds + 1):
        if r == 0:
            layer = [mk_vertex(0, s) for s in committee.members]
        else:
            layer = []
            width = rng.randint(quorum, committee.n)
            present = sorted(rng.sample(committee.members, k=width))
            for s in present:
                k = rng.randint(quorum, len(prev))
                edges = [v.id for v in rng.sample(prev, k=k)]
                layer.append(mk_vertex(r, s, edges))
        vertices.extend(layer)
        prev = layer
    return vertices


def replay(committee, vertices, order, schedule_seed=0, switch_span=None, slots=None):
    """Feed vertices to a fresh commit state in the given order, buffering
    out-of-order arrivals the way a node would. Returns the commit state."""
    dag = DagState(committee)
    if slots is not None:
        genesis = Schedule(epoch=0, initial_round=0, slots=tuple(slots))
    else:
        genesis = initial_schedule(committee, schedule_seed, committee.n)
    state = CommitState(committee=committee, book=ScheduleBook(genesis), switch_span=switch_span)
    tracer = Tracer(0)
    pending = {}
    for idx in order:
        v = vertices[idx]
        outcome = dag.insert(v)
        inserted = []
        if outcome is InsertOutcome.INSERTED:
            inserted.append(v)
            progress = True
            while progress:
                progress = False
                for vid in sorted(pending):
                    if dag.insert(pending[vid]) is InsertOutcome.INSERTED:
                        inserted.append(pending.pop(vid))
                        progress = True
        elif outcome is InsertOutcome.MISSING_PARENTS:
            pending[v.id] = v
        inserted.sort(key=lambda x: x.id)
        for w in inserted:
            before = state.book.epoch_count
            try_committing(state, dag, w, tracer)
            if state.book.epoch_count != before:
                retro_recheck(state, dag, tracer)
    return state, dag, tracer


def quick_run(**overrides):
    raw = {"stakes": [1, 1, 1, 1], "stop": {"maxRound": 20}, "Delta": 2, "seed": 0}
    raw.update(overrides)
    cfg = parse_config(raw)
    return cfg, run(cfg)


def manifest_for(cfg):
    return {"config": cfg.to_json_dict()}
