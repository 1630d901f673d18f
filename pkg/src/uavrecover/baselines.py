"""Reference recovery schemes run on the same tick engine as C3RUN.

* RIM: every former neighbour of the failed node closes in to half the
  radio range around the failure position; anyone who loses a link to a
  relocated neighbour chases it, and so on until nothing moves.
* LeDiR: only the smallest cluster moves.  Its node nearest the failure
  position flies there, the rest follow their parent in a hop-count tree.
* Cooperative Bridges: static CC only, never moves anything.

Only RIM and LeDiR are mobile; both use direct links exclusively.
"""

from __future__ import annotations

from collections import deque
from typing import Optional

from .channel import has_direct_link
from .engine import RecoveryLimits, RecoveryReport, TickEngine
from .model import LinkParams, NetworkState, Point, distance, step_toward
from .recovery import FailureAssessment, static_cc_repair
from .topology import AdjacencyGraph, build_adjacency, is_connected, nearest_to


# sub-nanometre gaps are rounding residue, not distance left to fly
_EPS = 1e-9


def _linked(state: NetworkState, params: LinkParams, u: int, v: int) -> bool:
    a, b = state.node(u), state.node(v)
    return has_direct_link(a, b, params) and has_direct_link(b, a, params)


def _run_ticks(engine: TickEngine, plan, phase: str) -> bool:
    """Drive synchronous ticks until ``plan`` proposes no move; False on budget."""
    while True:
        moves = plan()
        if not moves:
            return True
        if engine.out_of_ticks:
            return False
        engine.commit(engine.apply(moves))
        engine.end_tick(phase)


def run_rim(state: NetworkState, assessment: FailureAssessment, params: LinkParams,
            limits: RecoveryLimits = RecoveryLimits()) -> RecoveryReport:
    engine = TickEngine(state, limits)
    target = state.failed_pos
    radius = params.direct_range(state.node(assessment.failed).power) / 2.0
    primaries = set(assessment.neighbors)
    tethers = build_adjacency(state, params)

    def plan() -> dict[int, Point]:
        moves = {}
        for u in state.alive_ids():
            p = state.node(u).pos
            if u in primaries:
                gap = distance(p, target) - radius
                if gap > _EPS:
                    moves[u] = step_toward(p, target, min(limits.step, gap))
                continue
            lost = [v for v in tethers.neighbors(u)
                    if engine.log.moved(v) and not _linked(state, params, u, v)]
            if lost:
                leader = nearest_to(state, lost, p)
                moves[u] = step_toward(p, state.node(leader).pos, limits.step)
        return {u: q for u, q in moves.items() if q != state.node(u).pos}

    finished = _run_ticks(engine, plan, "RimCascade")
    success = finished and is_connected(build_adjacency(state, params))
    return engine.report("rim", success)


def _hop_tree(g: AdjacencyGraph, root: int, members: frozenset[int]) -> dict[int, int]:
    parent = {root: root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in sorted(g.neighbors(u)):
            if v in members and v not in parent:
                parent[v] = u
                queue.append(v)
    return parent


def run_ledir(state: NetworkState, assessment: FailureAssessment, params: LinkParams,
              limits: RecoveryLimits = RecoveryLimits()) -> RecoveryReport:
    engine = TickEngine(state, limits)
    if not assessment.is_cut_vertex:
        return engine.report("ledir", True)
    target = state.failed_pos
    cluster = min(assessment.clusters, key=lambda c: (len(c.members), c.label))
    lead = nearest_to(state, cluster.members, target)
    parent = _hop_tree(build_adjacency(state, params), lead, cluster.members)

    def plan() -> dict[int, Point]:
        moves = {}
        for u in sorted(cluster.members):
            p = state.node(u).pos
            if u == lead:
                q = step_toward(p, target, limits.step)
            elif u in parent and not _linked(state, params, u, parent[u]):
                q = step_toward(p, state.node(parent[u]).pos, limits.step)
            else:
                continue
            if q != p:
                moves[u] = q
        return moves

    finished = _run_ticks(engine, plan, "LeDiRBlock")
    success = finished and is_connected(build_adjacency(state, params))
    return engine.report("ledir", success)


def run_coop_bridges(state: NetworkState, assessment: FailureAssessment, params: LinkParams,
                     limits: Optional[RecoveryLimits] = None) -> RecoveryReport:
    engine = TickEngine(state, limits or RecoveryLimits())
    if not assessment.is_cut_vertex:
        return engine.report("ccbridges", True)
    g = build_adjacency(state, params)
    fronts = assessment.frontiers
    links, bridges = [], []
    for i in range(len(fronts)):
        for j in range(i + 1, len(fronts)):
            br = static_cc_repair(state, fronts[i].members, fronts[j].members, params, g)
            if br is not None:
                links.append((i, j))
                bridges.append(br.anchors)
    cluster_graph = AdjacencyGraph.from_edges(range(len(fronts)), links)
    return engine.report("ccbridges", is_connected(cluster_graph), bridges)
