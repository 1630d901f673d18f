"""Direct-link graph structure: components, cut vertices, helper and frontier sets."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

import numpy as np

from .channel import HelperSet
from .model import LinkParams, NetworkState, Point, UavNode, distance

Edge = tuple[int, int]


@dataclass(frozen=True)
class AdjacencyGraph:
    nodes: tuple[int, ...]
    adj: Mapping[int, frozenset[int]] = field(repr=False)

    def __contains__(self, node_id: int) -> bool:
        return node_id in self.adj

    def neighbors(self, node_id: int) -> frozenset[int]:
        return self.adj[node_id]

    def edges(self) -> set[Edge]:
        return {(u, v) for u in self.nodes for v in self.adj[u] if u < v}

    def degree(self, node_id: int) -> int:
        return len(self.adj[node_id])

    @classmethod
    def from_edges(cls, nodes: Iterable[int], edges: Iterable[Edge]) -> "AdjacencyGraph":
        adj: dict[int, set[int]] = {n: set() for n in nodes}
        for u, v in edges:
            if u == v:
                continue
            adj[u].add(v)
            adj[v].add(u)
        return cls(tuple(sorted(adj)), {n: frozenset(s) for n, s in adj.items()})


@dataclass(frozen=True)
class Cluster:
    label: int
    members: frozenset[int]


@dataclass(frozen=True)
class FrontierSet:
    label: int
    members: frozenset[int]
    synthetic: bool = False


def link_matrix(nodes: list[UavNode], params: LinkParams) -> np.ndarray:
    """Boolean matrix of symmetric direct links between ``nodes``.

    Uses exactly the arithmetic of ``channel.pairwise_snr`` so the two agree
    at the range boundary.
    """
    n = len(nodes)
    if n == 0:
        return np.zeros((0, 0), dtype=bool)
    x = np.fromiter((u.pos.x for u in nodes), float, n)
    y = np.fromiter((u.pos.y for u in nodes), float, n)
    p = np.fromiter((u.power for u in nodes), float, n)
    dx = x[:, None] - x[None, :]
    dy = y[:, None] - y[None, :]
    d = np.maximum(np.sqrt(dx * dx + dy * dy), params.d_min)
    snr = p[:, None] / (d ** params.alpha * params.noise)
    ok = snr >= params.tau
    ok &= ok.T
    np.fill_diagonal(ok, False)
    return ok


def build_adjacency(state: NetworkState, params: LinkParams,
                    ids: Optional[Iterable[int]] = None) -> AdjacencyGraph:
    """Direct-link graph over alive nodes (optionally only the given ids)."""
    if ids is None:
        nodes = [n for n in sorted(state.nodes, key=lambda u: u.id) if n.alive]
    else:
        nodes = [state.node(i) for i in sorted(ids)]
        nodes = [n for n in nodes if n.alive]
    ok = link_matrix(nodes, params)
    order = [n.id for n in nodes]
    adj = {}
    for k, nid in enumerate(order):
        adj[nid] = frozenset(order[j] for j in np.flatnonzero(ok[k]))
    return AdjacencyGraph(tuple(order), adj)


def _flood(start: int, adj: Mapping[int, Iterable[int]], seen: set[int]) -> set[int]:
    comp = {start}
    seen.add(start)
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                comp.add(v)
                queue.append(v)
    return comp


def _merge_extra(g: AdjacencyGraph, extra_edges: Optional[Iterable[Edge]]) -> dict[int, set[int]]:
    adj = {u: set(vs) for u, vs in g.adj.items()}
    for u, v in extra_edges or ():
        if u in adj and v in adj and u != v:
            adj[u].add(v)
            adj[v].add(u)
    return adj


def connected_components(g: AdjacencyGraph,
                         extra_edges: Optional[Iterable[Edge]] = None) -> list[Cluster]:
    adj = _merge_extra(g, extra_edges) if extra_edges else g.adj
    seen: set[int] = set()
    comps = []
    for u in g.nodes:  # ascending, so each component is found from its smallest id
        if u not in seen:
            comps.append(frozenset(_flood(u, adj, seen)))
    return [Cluster(label, members) for label, members in enumerate(comps)]


def is_connected(g: AdjacencyGraph, extra_edges: Optional[Iterable[Edge]] = None) -> bool:
    if len(g.nodes) <= 1:
        return True
    adj = _merge_extra(g, extra_edges) if extra_edges else g.adj
    return len(_flood(g.nodes[0], adj, set())) == len(g.nodes)


def articulation_points(g: AdjacencyGraph) -> set[int]:
    """Cut vertices via an iterative Hopcroft-Tarjan low-link DFS."""
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    cuts: set[int] = set()
    counter = 0
    for root in g.nodes:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        root_children = 0
        stack = [(root, -1, iter(sorted(g.adj[root])))]
        while stack:
            u, parent, it = stack[-1]
            advanced = False
            for v in it:
                if v == parent:
                    continue
                if v in disc:
                    low[u] = min(low[u], disc[v])
                else:
                    disc[v] = low[v] = counter
                    counter += 1
                    stack.append((v, u, iter(sorted(g.adj[v]))))
                    advanced = True
                    break
            if advanced:
                continue
            stack.pop()
            if parent == -1:
                continue
            low[parent] = min(low[parent], low[u])
            if parent == root:
                root_children += 1
            elif low[u] >= disc[parent]:
                cuts.add(parent)
        if root_children > 1:
            cuts.add(root)
    return cuts


def helpers(g: AdjacencyGraph, anchor: int) -> HelperSet:
    if anchor not in g:
        raise ValueError(f"anchor {anchor} is not an alive node of the graph")
    return HelperSet(anchor, frozenset(g.adj[anchor]) | {anchor})


def former_neighbors(state: NetworkState, failed: int, params: LinkParams) -> set[int]:
    """Alive nodes that had a direct link to ``failed`` at its last position."""
    from .channel import pairwise_snr

    dead = state.node(failed)
    probe = UavNode(dead.id, dead.pos, True, dead.power)
    out = set()
    for node in state.nodes:
        if node.id == failed or not node.alive:
            continue
        if (pairwise_snr(probe, node, params) >= params.tau
                and pairwise_snr(node, probe, params) >= params.tau):
            out.add(node.id)
    return out


def frontiers(state: NetworkState, failed: int, clusters: list[Cluster],
              params: Optional[LinkParams] = None,
              neighbors: Optional[Iterable[int]] = None) -> list[FrontierSet]:
    """Per-cluster sets of former neighbours of the failed node.

    ``neighbors`` should be recorded at failure time; when omitted it is
    recomputed from the current positions (which requires ``params``).
    A cluster with no former neighbour falls back to its member nearest the
    failure position.
    """
    if state.failed_pos is None:
        raise ValueError("failure position unknown; inject the failure first")
    if neighbors is None:
        if params is None:
            raise ValueError("params required to derive former neighbours")
        neighbors = former_neighbors(state, failed, params)
    neighbors = set(neighbors)
    out = []
    for c in clusters:
        members = c.members & neighbors
        if members:
            out.append(FrontierSet(c.label, frozenset(members)))
        else:
            out.append(FrontierSet(c.label, frozenset({nearest_to(state, c.members, state.failed_pos)}),
                                   synthetic=True))
    return out


def nearest_to(state: NetworkState, ids: Iterable[int], target: Point) -> int:
    return min(ids, key=lambda i: (distance(state.node(i).pos, target), i))
