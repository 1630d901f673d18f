"""Cooperative-communication connectivity recovery (C3RUN).

After a cut vertex fails, the clusters it leaves behind are re-joined one
pair at a time:

1. try a static bidirectional CC link between the two frontier sets;
2. otherwise each side advances its best-placed frontier node toward the
   failure position, then that node's helpers one by one;
3. re-test static CC;
4. finally grow a block around the mover and march it toward the failure
   position, absorbing tethering neighbours whenever a move would split the
   cluster.

Every move is tentative: it commits only if the mover's component stays
connected, so no step ever creates a new partition.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .channel import HelperSet, cc_margin, cc_snr, pairwise_snr
from .engine import InvariantViolation, RecoveryLimits, RecoveryReport, TickEngine
from .model import LinkParams, NetworkState, Point, UavNode, distance, step_toward
from .topology import (
    AdjacencyGraph,
    Cluster,
    FrontierSet,
    build_adjacency,
    connected_components,
    former_neighbors,
    frontiers,
    helpers,
    nearest_to,
)

ALGORITHM = "c3run"


class RecoveryPhase(enum.Enum):
    IDLE = "Idle"
    STATIC_CC = "StaticCC"
    MOVER_ADVANCE = "MoverAdvance"
    HELPER_ADVANCE = "HelperAdvance"
    STATIC_CC_RETRY = "StaticCCRetry"
    BLOCK_ADVANCE = "BlockAdvance"
    DONE = "Done"
    FAILED = "Failed"


class MoveOutcome(enum.Enum):
    ADVANCED = "Advanced"
    BLOCKED = "Blocked"
    BRIDGED = "Bridged"


@dataclass(frozen=True)
class CCBridge:
    side_a: HelperSet
    side_b: HelperSet

    @property
    def anchors(self) -> tuple[int, int]:
        return self.side_a.anchor, self.side_b.anchor


@dataclass(frozen=True)
class FailureAssessment:
    failed: int
    is_cut_vertex: bool
    clusters: list[Cluster]
    frontiers: list[FrontierSet]
    neighbors: frozenset[int]


def assess_failure(state: NetworkState, failed: int, params: LinkParams) -> FailureAssessment:
    """Kill ``failed`` in place and describe the partition it leaves."""
    node = state.node(failed)
    if not node.alive:
        raise ValueError(f"node {failed} has already failed")
    neigh = frozenset(former_neighbors(state, failed, params))
    node.alive = False
    state.failed_pos = node.pos
    clusters = connected_components(build_adjacency(state, params))
    fronts = frontiers(state, failed, clusters, neighbors=neigh)
    return FailureAssessment(failed, len(clusters) > 1, clusters, fronts, neigh)


# -- link-level decisions ---------------------------------------------------

def static_cc_repair(state: NetworkState, front_a: Iterable[int], front_b: Iterable[int],
                     params: LinkParams, g: Optional[AdjacencyGraph] = None
                     ) -> Optional[CCBridge]:
    """Best bidirectional CC link between two frontier sets, if any exists.

    Pairs are ranked by the weaker direction's SNR surplus; ties keep the
    lexicographically smallest anchor pair.
    """
    g = g or build_adjacency(state, params)
    best, best_margin = None, None
    for a in sorted(front_a):
        ha = helpers(g, a)
        for b in sorted(front_b):
            hb = helpers(g, b)
            if ha.members & hb.members:
                # a shared neighbour: the clusters are already directly linked
                margin = float("inf")
            else:
                margin = cc_margin(ha, hb, state, params)
            if margin >= 0 and (best_margin is None or margin > best_margin):
                best, best_margin = CCBridge(ha, hb), margin
    return best


def choose_mover(state: NetworkState, own: Iterable[int], opposite: Iterable[int],
                 params: LinkParams, g: Optional[AdjacencyGraph] = None) -> int:
    """Frontier node whose helper set has the largest summed SNR to the far side."""
    own = sorted(own)
    if not own:
        raise ValueError("own frontier is empty")
    opposite = sorted(opposite)
    g = g or build_adjacency(state, params)
    best, best_score = None, None
    for i in own:
        h = helpers(g, i)
        score = sum(cc_snr(h, state.node(j), state, params)
                    for j in opposite if j not in h.members)
        if best_score is None or score > best_score:
            best, best_score = i, score
    return best


# -- per-side tick machinery ------------------------------------------------

@dataclass
class Side:
    name: str
    members: frozenset[int]
    frontier: frozenset[int]
    mover: int
    phase: RecoveryPhase = RecoveryPhase.MOVER_ADVANCE
    helper_queue: list[int] = field(default_factory=list)
    block: set[int] = field(default_factory=set)
    opposite: Optional["Side"] = field(default=None, repr=False)

    @property
    def active_helper(self) -> Optional[int]:
        return self.helper_queue[0] if self.helper_queue else None


class RecoveryRun:
    """Mutable context of one recovery execution (state, books, bridges)."""

    def __init__(self, state: NetworkState, assessment: FailureAssessment,
                 params: LinkParams, limits: RecoveryLimits):
        if state.failed_pos is None:
            raise ValueError("no failure injected")
        self.state = state
        self.assessment = assessment
        self.params = params
        self.limits = limits
        self.engine = TickEngine(state, limits)
        self.bridges: list[CCBridge] = []
        self.round_components: list[frozenset[int]] = []
        self._last_bridge: Optional[CCBridge] = None

    @property
    def target(self) -> Point:
        return self.state.failed_pos

    @property
    def step(self) -> float:
        return self.limits.step

    # connectivity -----------------------------------------------------

    def bridge_holds(self, bridge: CCBridge, g: AdjacencyGraph) -> bool:
        a, b = bridge.anchors
        if a not in g or b not in g:
            return False
        if b in g.neighbors(a):
            return True
        ha, hb = helpers(g, a), helpers(g, b)
        if ha.members & hb.members:
            return True
        return cc_margin(ha, hb, self.state, self.params) >= 0

    def valid_bridge_edges(self, g: AdjacencyGraph) -> list[tuple[int, int]]:
        return [br.anchors for br in self.bridges if self.bridge_holds(br, g)]

    def components(self) -> list[frozenset[int]]:
        g = build_adjacency(self.state, self.params)
        return [c.members for c in connected_components(g, self.valid_bridge_edges(g))]

    def component_connected(self, members: frozenset[int]) -> bool:
        g = build_adjacency(self.state, self.params, members)
        return len(connected_components(g, self.valid_bridge_edges(g))) <= 1

    def try_moves(self, side: Side, moves: dict[int, Point], force: bool = False) -> bool:
        old = self.engine.apply(moves)
        if force or self.component_connected(side.members):
            self.engine.commit(old)
            return True
        self.engine.revert(old)
        return False

    def check_invariants(self):
        for comp in self.round_components:
            if not self.component_connected(comp):
                raise InvariantViolation(
                    f"tick {self.engine.log.ticks}: component {sorted(comp)} split")

    def find_bridge(self, a: Side, b: Side) -> tuple[bool, Optional[CCBridge]]:
        """(joined, bridge): joined by a direct link (bridge None) or by CC."""
        g = build_adjacency(self.state, self.params)
        for u in a.members:
            if g.neighbors(u) & b.members:
                return True, None
        bridge = static_cc_repair(self.state, a.frontier | {a.mover},
                                  b.frontier | {b.mover}, self.params, g)
        return bridge is not None, bridge

    def bridged(self, side: Side) -> bool:
        joined, bridge = self.find_bridge(side, side.opposite)
        if joined:
            self._last_bridge = bridge
        return joined

    def links(self, u: UavNode, pos_u: Point, v: UavNode, pos_v: Point) -> bool:
        pu = UavNode(u.id, pos_u, True, u.power)
        pv = UavNode(v.id, pos_v, True, v.power)
        return (pairwise_snr(pu, pv, self.params) >= self.params.tau
                and pairwise_snr(pv, pu, self.params) >= self.params.tau)


def mover_tick(run: RecoveryRun, side: Side) -> MoveOutcome:
    """Step the chosen frontier node toward the failure position."""
    if run.bridged(side):
        return MoveOutcome.BRIDGED
    node = run.state.node(side.mover)
    nxt = step_toward(node.pos, run.target, run.step)
    if nxt == node.pos:
        return MoveOutcome.BLOCKED
    if not run.try_moves(side, {side.mover: nxt}):
        return MoveOutcome.BLOCKED
    return MoveOutcome.BRIDGED if run.bridged(side) else MoveOutcome.ADVANCED


def _helper_order(run: RecoveryRun, side: Side) -> list[int]:
    g = build_adjacency(run.state, run.params, side.members)
    members = helpers(g, side.mover).members - {side.mover}
    far = run.state.node(side.opposite.mover)
    return sorted(members, key=lambda h: (-pairwise_snr(run.state.node(h), far, run.params), h))


def helper_phase_tick(run: RecoveryRun, side: Side) -> MoveOutcome:
    """Advance the active helper one step; retire helpers that cannot move."""
    if run.bridged(side):
        return MoveOutcome.BRIDGED
    mover = run.state.node(side.mover)
    while side.helper_queue:
        h = run.state.node(side.helper_queue[0])
        nxt = step_toward(h.pos, run.target, run.step)
        if (nxt != h.pos and run.links(h, nxt, mover, mover.pos)
                and run.try_moves(side, {h.id: nxt})):
            return MoveOutcome.BRIDGED if run.bridged(side) else MoveOutcome.ADVANCED
        side.helper_queue.pop(0)
    return MoveOutcome.BLOCKED


def _block_frontier(run: RecoveryRun, side: Side) -> list[int]:
    """Component nodes outside the block that touch it (direct or via a bridge)."""
    g = build_adjacency(run.state, run.params, side.members)
    touching = set()
    for u in side.block:
        touching |= g.neighbors(u)
    for a, b in run.valid_bridge_edges(g):
        if a in side.block:
            touching.add(b)
        if b in side.block:
            touching.add(a)
    touching -= side.block
    if not touching:
        touching = set(side.members - side.block)
    return sorted(touching)


def block_phase_tick(run: RecoveryRun, side: Side) -> MoveOutcome:
    """March the block toward the failure position, growing it when needed."""
    if run.bridged(side):
        return MoveOutcome.BRIDGED
    while True:
        moves = {}
        for i in sorted(side.block):
            p = run.state.node(i).pos
            q = step_toward(p, run.target, run.step)
            if q != p:
                moves[i] = q
        whole = side.block >= side.members
        if moves and run.try_moves(side, moves, force=whole):
            return MoveOutcome.BRIDGED if run.bridged(side) else MoveOutcome.ADVANCED
        if whole:
            return MoveOutcome.BLOCKED
        cand = _block_frontier(run, side)
        side.block.add(nearest_to(run.state, cand, run.target))


def side_tick(run: RecoveryRun, side: Side) -> MoveOutcome:
    """Run the side's current phase, falling through exhausted phases."""
    while True:
        if side.phase is RecoveryPhase.MOVER_ADVANCE:
            out = mover_tick(run, side)
            if out is MoveOutcome.BLOCKED:
                side.phase = RecoveryPhase.HELPER_ADVANCE
                side.helper_queue = _helper_order(run, side)
                continue
            return out
        if side.phase is RecoveryPhase.HELPER_ADVANCE:
            out = helper_phase_tick(run, side)
            if out is MoveOutcome.BLOCKED:
                side.phase = RecoveryPhase.STATIC_CC_RETRY
                continue
            return out
        if side.phase is RecoveryPhase.STATIC_CC_RETRY:
            if run.bridged(side):
                return MoveOutcome.BRIDGED
            side.phase = RecoveryPhase.BLOCK_ADVANCE
            g = build_adjacency(run.state, run.params, side.members)
            side.block = set(helpers(g, side.mover).members)
            continue
        if side.phase is RecoveryPhase.BLOCK_ADVANCE:
            return block_phase_tick(run, side)
        return MoveOutcome.BLOCKED


# -- orchestration ----------------------------------------------------------

def _component_frontier(run: RecoveryRun, comp: frozenset[int]) -> frozenset[int]:
    f = comp & run.assessment.neighbors
    if f:
        return frozenset(f)
    return frozenset({nearest_to(run.state, comp, run.target)})


def _pairs_by_distance(run: RecoveryRun, fronts: list[frozenset[int]]) -> list[tuple[int, int]]:
    scored = []
    for i, j in itertools.combinations(range(len(fronts)), 2):
        d = min(distance(run.state.node(a).pos, run.state.node(b).pos)
                for a in fronts[i] for b in fronts[j])
        scored.append((d, i, j))
    return [(i, j) for _, i, j in sorted(scored)]


def _mobile_repair(run: RecoveryRun, comp_a: frozenset[int], front_a: frozenset[int],
                   comp_b: frozenset[int], front_b: frozenset[int]) -> bool:
    """Steps 3-4 for one pair; False if the tick budget ran out or nothing can move."""
    state, params = run.state, run.params
    g = build_adjacency(state, params)
    a = Side("A", comp_a, front_a, choose_mover(state, front_a, front_b, params, g))
    b = Side("B", comp_b, front_b, choose_mover(state, front_b, front_a, params, g))
    a.opposite, b.opposite = b, a
    run._last_bridge = None
    while True:
        if run.engine.out_of_ticks:
            return False
        outcome = MoveOutcome.BLOCKED
        for side in (a, b):
            outcome = side_tick(run, side)
            if outcome is MoveOutcome.BRIDGED:
                break
        moved = run.engine.end_tick(f"A:{a.phase.value},B:{b.phase.value}")
        if moved and run.limits.check_invariants:
            run.check_invariants()
        if outcome is MoveOutcome.BRIDGED:
            if run._last_bridge is not None:
                run.bridges.append(run._last_bridge)
            return True
        if not moved:
            return False


def run_recovery(state: NetworkState, assessment: FailureAssessment, params: LinkParams,
                 limits: RecoveryLimits = RecoveryLimits()) -> RecoveryReport:
    """Repair the partition described by ``assessment``; mutates ``state``.

    Each round first looks for a static CC bridge between any two current
    components (nearest frontier pair first).  Only when none exists does
    the nearest pair fall back to movement.
    """
    run = RecoveryRun(state, assessment, params, limits)
    if not assessment.is_cut_vertex:
        return run.engine.report(ALGORITHM, True)
    while True:
        comps = run.components()
        if len(comps) <= 1:
            return run.engine.report(ALGORITHM, True, _bridge_pairs(run))
        run.round_components = comps
        fronts = [_component_frontier(run, c) for c in comps]
        order = _pairs_by_distance(run, fronts)
        g = build_adjacency(state, params)
        for i, j in order:
            bridge = static_cc_repair(state, fronts[i], fronts[j], params, g)
            if bridge is not None:
                run.bridges.append(bridge)
                break
        else:
            i, j = order[0]
            if not _mobile_repair(run, comps[i], fronts[i], comps[j], fronts[j]):
                return run.engine.report(ALGORITHM, False, _bridge_pairs(run))


def _bridge_pairs(run: RecoveryRun) -> list[tuple[int, int]]:
    return [br.anchors for br in run.bridges]
