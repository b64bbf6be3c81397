import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from repdag.dag import (
    AnchorReach,
    DagState,
    InsertOutcome,
    UnknownVertex,
    VertexId,
    causal_history,
    path,
)
from repdag.reputation import (
    NotAnchorRound,
    Schedule,
    ScheduleBook,
    UncoveredRound,
    get_anchor,
)

from .conftest import full_dag, mk_vertex, random_dag_vertices
from .oracles import naive_path


class TestInsert:
    def test_genesis_into_empty_dag(self, committee4):
        dag = DagState(committee4)
        assert dag.insert(mk_vertex(0, 0)) is InsertOutcome.INSERTED
        assert VertexId(0, 0) in dag
        assert dag.highest_round == 0

    def test_round_one_with_quorum_edges(self, committee4):
        dag = DagState(committee4)
        genesis = [mk_vertex(0, s) for s in range(3)]
        for g in genesis:
            dag.insert(g)
        v = mk_vertex(1, 0, [g.id for g in genesis])
        assert dag.insert(v) is InsertOutcome.INSERTED
        assert dag.highest_round == 1

    def test_missing_parent_rejected(self, committee4):
        dag = full_dag(committee4, 1, absent={(1, 3)})
        orphan = mk_vertex(2, 0, [VertexId(1, 0), VertexId(1, 1), VertexId(1, 3)])
        assert dag.insert(orphan) is InsertOutcome.MISSING_PARENTS
        assert orphan.id not in dag

    def test_duplicate_rejected(self, committee4):
        dag = DagState(committee4)
        dag.insert(mk_vertex(0, 2))
        assert dag.insert(mk_vertex(0, 2)) is InsertOutcome.DUPLICATE

    def test_malformed_edges_rejected(self, committee4):
        dag = full_dag(committee4, 1)
        too_few = mk_vertex(2, 0, [VertexId(1, 0), VertexId(1, 1)])
        assert dag.insert(too_few) is InsertOutcome.MALFORMED_EDGES
        wrong_round = mk_vertex(2, 0, [VertexId(0, 0), VertexId(0, 1), VertexId(0, 2)])
        assert dag.insert(wrong_round) is InsertOutcome.MALFORMED_EDGES
        genesis_with_edges = mk_vertex(0, 3, [VertexId(0, 0)])
        dag.insert(mk_vertex(0, 3))
        assert dag.insert(genesis_with_edges) is InsertOutcome.MALFORMED_EDGES


class TestPath:
    def test_reflexive(self, committee4):
        dag = DagState(committee4)
        dag.insert(mk_vertex(0, 0))
        assert path(dag, VertexId(0, 0), VertexId(0, 0))

    def test_linear_chain(self):
        from repdag.committee import new_committee

        solo = new_committee([1])  # quorum of one keeps the chain minimal
        dag = DagState(solo)
        g = mk_vertex(0, 0)
        a = mk_vertex(1, 0, [g.id])
        b = mk_vertex(2, 0, [a.id])
        for v in (g, a, b):
            assert dag.insert(v) is InsertOutcome.INSERTED
        assert path(dag, b.id, g.id)
        assert not path(dag, g.id, b.id)

    def test_disjoint_genesis_unreachable(self, committee4):
        dag = DagState(committee4)
        dag.insert(mk_vertex(0, 0))
        dag.insert(mk_vertex(0, 1))
        assert not path(dag, VertexId(0, 0), VertexId(0, 1))

    def test_unknown_start_raises(self, committee4):
        dag = DagState(committee4)
        with pytest.raises(UnknownVertex):
            path(dag, VertexId(0, 0), VertexId(0, 1))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_matches_naive_dfs(self, seed):
        from repdag.committee import new_committee

        committee = new_committee([1, 1, 1, 1])
        rng = random.Random(seed)
        vertices = random_dag_vertices(rng, committee, 6)
        dag = DagState(committee)
        for v in vertices:
            dag.insert(v)
        probes = rng.sample(vertices, k=min(12, len(vertices)))
        for a in probes:
            for b in probes:
                assert path(dag, a.id, b.id) == naive_path(dag, a.id, b.id)
                if path(dag, a.id, b.id):
                    assert b.round <= a.round

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_insert_order_independence(self, seed):
        from repdag.committee import new_committee

        committee = new_committee([1, 1, 1, 1])
        rng = random.Random(seed)
        vertices = random_dag_vertices(rng, committee, 5)

        def build(order):
            dag = DagState(committee)
            pending = list(order)
            while pending:
                before = len(pending)
                pending = [v for v in pending if dag.insert(v) is not InsertOutcome.INSERTED]
                assert len(pending) < before, "no causally valid progress"
            return dag

        reference = build(vertices)
        shuffled = vertices[:]
        rng.shuffle(shuffled)
        other = build(shuffled)
        assert {v.id for v in reference.all_vertices()} == {v.id for v in other.all_vertices()}

    def test_causal_completeness_full_walk(self, committee4):
        dag = full_dag(committee4, 4)
        for v in dag.all_vertices():
            for ancestor in causal_history(dag, v.id):
                assert ancestor in dag


class TestAnchorReach:
    def test_agrees_with_path(self, committee4):
        rng = random.Random(7)
        vertices = random_dag_vertices(rng, committee4, 6)
        dag = DagState(committee4)
        for v in vertices:
            dag.insert(v)
        target = vertices[2].id
        reach = AnchorReach(dag, target, max_round=dag.highest_round)
        for v in vertices:
            assert reach.covers(v.id) == path(dag, v.id, target)


class TestLeaders:
    def test_first_slot(self):
        s = Schedule(epoch=0, initial_round=0, slots=(0, 1, 2, 3))
        assert s.leader_for(0) == 0

    def test_cyclic_index(self):
        # rounds 0, 2, 4, 6 walk slots 0, 1, 2, 3 in order
        s = Schedule(epoch=0, initial_round=0, slots=(0, 1, 2, 3))
        assert [s.leader_for(r) for r in (0, 2, 4, 6)] == [0, 1, 2, 3]
        assert s.leader_for(8) == 0

    def test_second_schedule_takes_over(self):
        book = ScheduleBook(Schedule(epoch=0, initial_round=0, slots=(0, 1, 2, 3)))
        book.append(Schedule(epoch=1, initial_round=10, slots=(1, 2, 3, 1)))
        assert book.leader_for(8) == 0
        assert book.leader_for(10) == 1
        assert book.leader_for(12) == 2

    def test_odd_round_rejected(self):
        s = Schedule(epoch=0, initial_round=0, slots=(0, 1))
        with pytest.raises(NotAnchorRound):
            s.leader_for(3)

    def test_uncovered_round_rejected(self):
        s = Schedule(epoch=2, initial_round=10, slots=(0, 1))
        with pytest.raises(UncoveredRound):
            s.leader_for(8)

    def test_deterministic_across_replicas(self, committee4):
        rng = random.Random(3)
        vertices = random_dag_vertices(rng, committee4, 6)
        book = ScheduleBook(Schedule(epoch=0, initial_round=0, slots=(2, 0, 3, 1)))
        dag_a = DagState(committee4)
        for v in vertices:
            dag_a.insert(v)
        shuffled = vertices[:]
        rng.shuffle(shuffled)
        dag_b = DagState(committee4)
        pending = shuffled
        while pending:
            pending = [v for v in pending if dag_b.insert(v) is not InsertOutcome.INSERTED]
        for r in range(0, dag_a.highest_round + 1, 2):
            va = get_anchor(dag_a, book, r)
            vb = get_anchor(dag_b, book, r)
            assert (va.id if va else None) == (vb.id if vb else None)


class TestGetAnchor:
    def test_present_anchor(self, committee4):
        dag = full_dag(committee4, 2)
        book = ScheduleBook(Schedule(epoch=0, initial_round=0, slots=(0, 1, 2, 3)))
        anchor = get_anchor(dag, book, 2)
        assert anchor is not None and anchor.id == VertexId(2, 1)

    def test_crashed_leader_absent(self, committee4):
        dag = full_dag(committee4, 2, absent={(2, 1)})
        book = ScheduleBook(Schedule(epoch=0, initial_round=0, slots=(0, 1, 2, 3)))
        assert get_anchor(dag, book, 2) is None

    def test_lookup_reflects_dag_contents(self, committee4):
        dag = full_dag(committee4, 1)
        book = ScheduleBook(Schedule(epoch=0, initial_round=0, slots=(0, 2, 1, 3)))
        assert get_anchor(dag, book, 2) is None
        late = mk_vertex(2, 2, [VertexId(1, s) for s in range(4)])
        dag.insert(late)
        assert get_anchor(dag, book, 2).id == late.id
