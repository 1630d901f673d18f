"""Scenario construction and dispatch to the recovery algorithms.

Randomness comes from numpy's PCG64 bit generator.  A sweep derives one
64-bit scenario seed per (density, trial) through ``SeedSequence`` spawn
keys, so every trial is reproducible on its own with ``seed_for``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .baselines import run_coop_bridges, run_ledir, run_rim
from .engine import RecoveryLimits, RecoveryReport
from .model import LinkParams, NetworkState, Point, UavNode
from .recovery import assess_failure, run_recovery
from .topology import articulation_points, build_adjacency

ALGORITHMS: dict[str, Callable[..., RecoveryReport]] = {
    "c3run": run_recovery,
    "rim": run_rim,
    "ledir": run_ledir,
    "ccbridges": run_coop_bridges,
}

DEFAULT_RESAMPLE_CAP = 10_000
DEFAULT_SWEEPS = 50


class TopologyGenerationError(RuntimeError):
    pass


class NoCutVertex(LookupError):
    """The topology has no articulation point; draw another one."""


def seed_for(master_seed: int, n_nodes: int, trial: int) -> int:
    """64-bit scenario seed of one (density, trial) cell of a sweep."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(n_nodes, trial))
    return int(ss.generate_state(1, np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _links_to(xy: np.ndarray, power: np.ndarray, cand: np.ndarray, cand_power: float,
              params: LinkParams) -> np.ndarray:
    """Which existing nodes share a symmetric direct link with a candidate position."""
    dx = xy[:, 0] - cand[0]
    dy = xy[:, 1] - cand[1]
    d = np.maximum(np.sqrt(dx * dx + dy * dy), params.d_min) ** params.alpha * params.noise
    return (power / d >= params.tau) & (cand_power / d >= params.tau)


def _all_reachable(adj: np.ndarray) -> bool:
    reach = np.zeros(len(adj), dtype=bool)
    reach[0] = True
    front = reach.copy()
    while front.any():
        front = adj[front].any(axis=0) & ~reach
        reach |= front
    return bool(reach.all())


def generate_connected_topology(n: int, area: float, params: LinkParams,
                                rng: np.random.Generator, power: float = 1.0,
                                max_attempts: int = DEFAULT_RESAMPLE_CAP,
                                method: str = "mcmc", sweeps: int = DEFAULT_SWEEPS
                                ) -> NetworkState:
    """Place ``n`` nodes in ``[0, area]^2`` so that the direct-link graph is connected.

    Methods:

    ``rejection``
        redraw the whole placement until connected.  Exact, but hopeless
        below roughly 60 nodes in a 300 m square with 50 m range.
    ``sequential``
        draw node k uniformly and redraw it (up to ``max_attempts`` times)
        until it links to a node already placed.  Fast, but clumps nodes.
    ``mcmc``
        start from a sequential placement, then run ``sweeps * n`` proposals
        that move one random node to a fresh uniform position, accepted iff
        the graph stays connected.  The proposal is symmetric, so the chain
        targets the uniform distribution restricted to connected placements,
        i.e. the same law as ``rejection``.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if method not in ("rejection", "sequential", "mcmc"):
        raise ValueError(f"unknown placement method {method!r}")
    pw = np.full(n, float(power))

    if method == "rejection":
        for _ in range(max_attempts):
            xy = rng.uniform(0.0, area, size=(n, 2))
            adj = np.array([_links_to(xy, pw, xy[k], power, params) for k in range(n)])
            np.fill_diagonal(adj, False)
            if _all_reachable(adj):
                return _to_state(xy, power)
        raise TopologyGenerationError(
            f"no connected placement of {n} nodes in {max_attempts} draws")

    xy = np.empty((n, 2))
    xy[0] = rng.uniform(0.0, area, size=2)
    for k in range(1, n):
        for _ in range(max_attempts):
            cand = rng.uniform(0.0, area, size=2)
            if _links_to(xy[:k], pw[:k], cand, power, params).any():
                xy[k] = cand
                break
        else:
            raise TopologyGenerationError(
                f"node {k} found no neighbour in {max_attempts} draws")

    if method == "mcmc":
        adj = np.array([_links_to(xy, pw, xy[k], power, params) for k in range(n)])
        np.fill_diagonal(adj, False)
        for _ in range(sweeps * n):
            k = int(rng.integers(n))
            cand = rng.uniform(0.0, area, size=2)
            row = _links_to(xy, pw, cand, power, params)
            row[k] = False
            old = adj[k].copy()
            adj[k] = row
            adj[:, k] = row
            if _all_reachable(adj):
                xy[k] = cand
            else:
                adj[k] = old
                adj[:, k] = old
    return _to_state(xy, power)


def _to_state(xy: np.ndarray, power: float) -> NetworkState:
    return NetworkState([UavNode(i, Point(float(xy[i, 0]), float(xy[i, 1])), True, power)
                         for i in range(len(xy))])


def select_failure(state: NetworkState, params: LinkParams, rng: np.random.Generator) -> int:
    cuts = sorted(articulation_points(build_adjacency(state, params)))
    if not cuts:
        raise NoCutVertex("topology is 2-connected")
    return cuts[int(rng.integers(len(cuts)))]


@dataclass(frozen=True)
class Scenario:
    state: NetworkState
    failed: int
    params: LinkParams
    speed: float = 1.0
    tick: float = 1.0
    max_ticks: int = 10_000
    seed: int = 0
    detection_delay: int = 0

    def limits(self, **overrides) -> RecoveryLimits:
        base = RecoveryLimits(speed=self.speed, tick=self.tick, max_ticks=self.max_ticks,
                              detection_delay=self.detection_delay)
        return replace(base, **overrides)


def make_scenario(n: int, seed: int, params: LinkParams, area: float = 300.0,
                  power: float = 1.0, speed: float = 1.0, tick: float = 1.0,
                  max_ticks: int = 10_000, detection_delay: int = 0,
                  max_attempts: int = DEFAULT_RESAMPLE_CAP,
                  method: str = "mcmc", sweeps: int = DEFAULT_SWEEPS) -> Scenario:
    """Draw topologies from ``seed`` until one has a cut vertex, then pick the failure."""
    rng = make_rng(seed)
    for _ in range(max_attempts):
        state = generate_connected_topology(n, area, params, rng, power, max_attempts,
                                            method, sweeps)
        try:
            failed = select_failure(state, params, rng)
        except NoCutVertex:
            continue
        return Scenario(state, failed, params, speed, tick, max_ticks, seed, detection_delay)
    raise TopologyGenerationError(f"no topology with a cut vertex in {max_attempts} draws")


def simulate(scenario: Scenario, algorithm: str, check_invariants: bool = False,
             record_trace: bool = True) -> RecoveryReport:
    """Inject the scenario's failure on a private copy and run ``algorithm``."""
    try:
        runner = ALGORITHMS[algorithm]
    except KeyError:
        raise ValueError(f"unknown algorithm {algorithm!r}; "
                         f"choose from {', '.join(sorted(ALGORITHMS))}") from None
    state = scenario.state.copy()
    assessment = assess_failure(state, scenario.failed, scenario.params)
    limits = scenario.limits(check_invariants=check_invariants, record_trace=record_trace)
    report = runner(state, assessment, scenario.params, limits)
    if assessment.is_cut_vertex and scenario.detection_delay:
        report = replace(report, recovery_ticks=report.recovery_ticks + scenario.detection_delay)
    return report
