import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from uavrecover.model import LinkParams, NetworkState
from uavrecover.recovery import assess_failure
from uavrecover.simulator import (
    ALGORITHMS,
    NoCutVertex,
    Scenario,
    TopologyGenerationError,
    generate_connected_topology,
    make_rng,
    make_scenario,
    seed_for,
    select_failure,
    simulate,
)
from uavrecover.topology import articulation_points, build_adjacency, is_connected

from conftest import make_state

DEFAULTS = LinkParams.from_range(50.0)


def test_seed_for_is_stable_and_distinct():
    assert seed_for(1, 20, 0) == seed_for(1, 20, 0)
    seeds = {seed_for(1, n, t) for n in range(20, 51, 5) for t in range(15)}
    assert len(seeds) == 7 * 15
    assert seed_for(1, 20, 0) != seed_for(2, 20, 0)
    assert 0 <= seed_for(1, 20, 0) < 2 ** 64


def test_make_rng_is_pcg64():
    a, b = make_rng(99), make_rng(99)
    assert isinstance(a.bit_generator, np.random.PCG64)
    assert a.integers(1 << 30, size=4).tolist() == b.integers(1 << 30, size=4).tolist()


@pytest.mark.parametrize("method", ["mcmc", "sequential"])
def test_generate_connected_in_bounds(method):
    s = generate_connected_topology(20, 300.0, DEFAULTS, make_rng(5), method=method)
    assert len(s.nodes) == 20
    assert all(0 <= u.pos.x <= 300 and 0 <= u.pos.y <= 300 for u in s.nodes)
    assert is_connected(build_adjacency(s, DEFAULTS))


def test_generate_two_nodes_small_area_rejection():
    s = generate_connected_topology(2, 10.0, DEFAULTS, make_rng(0), method="rejection")
    assert is_connected(build_adjacency(s, DEFAULTS))


def test_generate_cap_exceeded():
    with pytest.raises(TopologyGenerationError):
        generate_connected_topology(20, 300.0, DEFAULTS, make_rng(0), method="rejection",
                                    max_attempts=3)
    with pytest.raises(TopologyGenerationError):
        generate_connected_topology(3, 1e6, DEFAULTS, make_rng(0), method="sequential",
                                    max_attempts=3)


def test_generate_rejects_bad_arguments():
    with pytest.raises(ValueError):
        generate_connected_topology(1, 300.0, DEFAULTS, make_rng(0))
    with pytest.raises(ValueError):
        generate_connected_topology(5, 300.0, DEFAULTS, make_rng(0), method="grid")


def _mean_degree(n, seeds):
    degs = []
    for sd in seeds:
        g = build_adjacency(generate_connected_topology(n, 300.0, DEFAULTS, make_rng(sd),
                                                        sweeps=10), DEFAULTS)
        degs.append(2 * len(g.edges()) / n)
    return sum(degs) / len(degs)


def test_mean_degree_grows_with_density():
    assert _mean_degree(50, range(100)) > _mean_degree(20, range(100, 200))


def test_select_failure_path_interior():
    s = make_state(*[(40 * k, 0) for k in range(5)])
    for sd in range(30):
        assert select_failure(s, DEFAULTS, make_rng(sd)) in {1, 2, 3}


def test_select_failure_complete_graph():
    s = make_state((0, 0), (10, 0), (0, 10), (10, 10))
    with pytest.raises(NoCutVertex):
        select_failure(s, DEFAULTS, make_rng(0))


def test_select_failure_single_cut_vertex():
    s = make_state((0, 0), (10, 0), (45, 0), (70, 20), (70, -20))
    assert articulation_points(build_adjacency(s, DEFAULTS)) == {2}
    assert {select_failure(s, DEFAULTS, make_rng(sd)) for sd in range(20)} == {2}


def test_simulate_determinism_and_copy():
    sc = make_scenario(30, 42, DEFAULTS)
    before = [u.pos for u in sc.state.nodes]
    for algo in ALGORITHMS:
        assert simulate(sc, algo) == simulate(sc, algo)
    assert [u.pos for u in sc.state.nodes] == before
    assert all(u.alive for u in sc.state.nodes)


def test_simulate_static_solvable():
    s = make_state((0, 0), (-35, 0), (-36, 0), (35, 0), (36, 0))
    sc = Scenario(s, 0, DEFAULTS)
    rep = simulate(sc, "c3run")
    assert rep.success and rep.recovery_ticks == 0 and rep.nodes_moved == 0
    assert simulate(sc, "ccbridges").nodes_moved == 0


def test_simulate_detection_delay():
    s = make_state((0, 0), (-100, 0), (100, 0))
    plain = simulate(Scenario(s, 0, DEFAULTS), "c3run")
    delayed = simulate(Scenario(s, 0, DEFAULTS, detection_delay=3), "c3run")
    assert delayed.recovery_ticks == plain.recovery_ticks + 3


def test_simulate_unknown_algorithm():
    sc = Scenario(make_state((0, 0), (40, 0), (80, 0)), 1, DEFAULTS)
    with pytest.raises(ValueError, match="unknown algorithm"):
        simulate(sc, "dijkstra")


@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2 ** 64 - 1), st.sampled_from([20, 35, 50]))
def test_scenario_invariants(seed, n):
    sc = make_scenario(n, seed, DEFAULTS, sweeps=5)
    assert isinstance(sc.state, NetworkState) and sc.seed == seed
    g = build_adjacency(sc.state, DEFAULTS)
    assert is_connected(g)
    assert sc.failed in articulation_points(g)
    s = sc.state.copy()
    assert len(assess_failure(s, sc.failed, DEFAULTS).clusters) >= 2
    assert simulate(sc, "ccbridges").nodes_moved == 0
