import math

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from uavrecover.baselines import run_coop_bridges, run_ledir, run_rim
from uavrecover.engine import RecoveryLimits
from uavrecover.model import LinkParams, Point
from uavrecover.recovery import assess_failure, run_recovery
from uavrecover.simulator import make_scenario

from conftest import make_state

DEFAULTS = LinkParams.from_range(50.0)


def run(algo, coords, failed=0):
    s = make_state(*coords)
    a = assess_failure(s, failed, DEFAULTS)
    return s, algo(s, a, DEFAULTS, RecoveryLimits())


def rim_line_oracle():
    """Path 0-1-2-3 at 40 m spacing, node 1 fails; synchronous 1 m ticks.

    Nodes 0 and 2 close to 25 m of x=40 (15 m each).  Node 3 chases node 2
    only while their gap exceeds 50 m.
    """
    x0, x2, x3 = 0.0, 80.0, 120.0
    moved = {0: 0.0, 2: 0.0, 3: 0.0}
    ticks = 0
    while True:
        step = {}
        if 40 - x0 > 25:
            step[0] = min(1.0, 40 - x0 - 25)
        if x2 - 40 > 25:
            step[2] = -min(1.0, x2 - 40 - 25)
        if x3 - x2 > 50:
            step[3] = -1.0
        if not step:
            return ticks, moved
        ticks += 1
        x0 += step.get(0, 0)
        x2 += step.get(2, 0)
        x3 += step.get(3, 0)
        for k, v in step.items():
            moved[k] += abs(v)


def test_rim_star():
    s, rep = run(run_rim, [(0, 0), (50, 0), (-50, 0), (0, 50), (0, -50)])
    assert rep.success and rep.nodes_moved == 4
    assert rep.total_distance == pytest.approx(100.0)
    assert rep.recovery_ticks == 25
    for i in range(1, 5):
        assert math.hypot(*s.node(i).pos) == pytest.approx(25.0)
    assert rep.bridges == ()


def test_rim_path_cascade():
    ticks, moved = rim_line_oracle()
    assert (ticks, moved) == (16, {0: 15.0, 2: 15.0, 3: 5.0})
    s, rep = run(run_rim, [(0, 0), (40, 0), (80, 0), (120, 0)], failed=1)
    assert rep.success
    assert rep.recovery_ticks == ticks
    assert dict(rep.path_lengths) == pytest.approx(moved)
    assert s.node(3).pos == Point(115, 0)


def test_rim_non_cut_vertex_still_relocates():
    h = 40 * math.sqrt(3) / 2
    s, rep = run(run_rim, [(0, 0), (40, 0), (20, h)], failed=2)
    assert rep.success and rep.nodes_moved == 2
    assert rep.total_distance == pytest.approx(30.0)


def test_ledir_singleton_flies_to_failure():
    s, rep = run(run_ledir, [(0, 0), (40, 0), (80, 0), (120, 0), (-120, 0)])
    assert rep.success and rep.nodes_moved == 1
    assert rep.total_distance == pytest.approx(120.0)
    assert rep.recovery_ticks == 120
    assert s.node(4).pos == Point(0, 0)


def test_ledir_line_of_three_follows():
    # lead 1 flies 40 m (ticks 1-40).  Node 2 starts trailing at tick 12,
    # when the gap first exceeds 50 m, and settles 50 m behind after tick 41
    # (30 m).  Node 3 starts at tick 23 and stops after tick 42 (20 m).
    coords = [(0, 0), (-40, 0), (-80, 0), (-120, 0),
              (40, 0), (80, 0), (120, 0), (160, 0)]
    s, rep = run(run_ledir, coords)
    assert rep.success and rep.nodes_moved == 3
    assert dict(rep.path_lengths) == pytest.approx({1: 40.0, 2: 30.0, 3: 20.0})
    assert rep.recovery_ticks == 42
    assert [s.node(i).pos.x for i in (1, 2, 3)] == pytest.approx([0.0, -50.0, -100.0])


def test_ledir_equal_clusters_lower_label_moves():
    s, rep = run(run_ledir, [(0, 0), (-45, 0), (45, 0)])
    assert rep.success and dict(rep.path_lengths) == pytest.approx({1: 45.0})


def test_ledir_non_cut_vertex():
    _, rep = run(run_ledir, [(0, 0), (40, 0), (20, 30)], failed=2)
    assert rep.success and rep.nodes_moved == 0


def test_coop_bridges_examples():
    _, rep = run(run_coop_bridges, [(0, 0), (-35, 0), (-36, 0), (35, 0), (36, 0)])
    assert rep.success and rep.nodes_moved == 0 and rep.bridges == ((1, 3),)
    _, rep = run(run_coop_bridges, [(0, 0), (-40, 0), (40, 0)])
    assert not rep.success and rep.nodes_moved == 0
    _, rep = run(run_coop_bridges, [(0, 0), (40, 0), (20, 30)], failed=2)
    assert rep.success


def test_coop_bridges_needs_connected_cluster_graph():
    # {1,2} and {3,4} bridge as in the symmetric pair; the singleton 5 is
    # 57 m from both and cannot reach anyone alone
    coords = [(0, 0), (-35, 0), (-36, 0), (35, 0), (36, 0), (0, -45)]
    _, rep = run(run_coop_bridges, coords)
    assert rep.bridges == ((1, 3),)
    assert not rep.success


@settings(max_examples=30, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 2 ** 32), st.sampled_from([15, 25, 40]))
def test_baseline_invariants(seed, n):
    sc = make_scenario(n, seed, DEFAULTS, sweeps=5)
    reports = {}
    for name, algo in (("cb", run_coop_bridges), ("rim", run_rim), ("ledir", run_ledir),
                       ("c3run", run_recovery)):
        s = sc.state.copy()
        reports[name] = algo(s, assess_failure(s, sc.failed, DEFAULTS), DEFAULTS,
                             RecoveryLimits())
    cb = reports["cb"]
    assert cb.nodes_moved == 0 and cb.total_distance == 0 and cb.recovery_ticks == 0
    assert reports["rim"].bridges == () and reports["ledir"].bridges == ()
    if cb.success:
        c3 = reports["c3run"]
        assert c3.success
        assert (c3.nodes_moved, c3.total_distance, c3.recovery_ticks) == (0, 0.0, 0)
