"""Independent brute-force oracles the implementation is checked against.

These stay deliberately naive: plain depth-first search for reachability,
literal per-round enumeration for scores, and a step-by-step rendering of
the swap rule. None of them share code with the package internals.
"""

from repdag.dag import DagState, UnknownVertex, VertexId


def naive_path(dag: DagState, frm: VertexId, to: VertexId) -> bool:
    if frm not in dag:
        raise UnknownVertex(frm)
    seen = set()

    def dfs(vid):
        if vid == to:
            return True
        seen.add(vid)
        for e in sorted(dag.get(vid).edges):
            if e not in seen and dfs(e):
                return True
        return False

    return dfs(frm)


def brute_scores(dag, book, committee, from_round, to_round_exclusive):
    points = {v: 0 for v in committee.members}
    if from_round >= to_round_exclusive:
        return points
    trigger = VertexId(to_round_exclusive, book.leader_for(to_round_exclusive))
    if dag.get(trigger) is None:
        return points
    start = from_round if from_round % 2 == 0 else from_round + 1
    for e in range(start, to_round_exclusive, 2):
        leader_vid = VertexId(e, book.leader_for(e))
        if dag.get(leader_vid) is None:
            continue
        for s in committee.members:
            voter = dag.get(VertexId(e + 1, s))
            if voter is None:
                continue
            if leader_vid in voter.edges and naive_path(dag, trigger, voter.id):
                points[s] += 1
    return points


def brute_swap(prev_slots, points, committee, exclusion_fraction=0.33):
    """Enumerate the demote and promote sets literally, then replace slots."""
    total = committee.total_stake
    cap = min(int(exclusion_fraction * total), (total - 1) // 3)
    by_worst = sorted(committee.members, key=lambda v: (points[v], -v))
    demoted = []
    spent = 0
    for v in by_worst:
        if spent + committee.stake(v) > cap:
            break
        demoted.append(v)
        spent += committee.stake(v)
    while len(demoted) > committee.n - len(demoted):
        demoted.pop()
    pool = [v for v in committee.members if v not in demoted]
    promoted = sorted(pool, key=lambda v: (-points[v], v))[: len(demoted)]
    slots = list(prev_slots)
    replaced = 0
    for i, holder in enumerate(prev_slots):
        if holder in demoted:
            slots[i] = promoted[replaced % len(promoted)]
            replaced += 1
    return slots, demoted, promoted
