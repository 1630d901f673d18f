import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from uavrecover.model import (
    LinkParams,
    NetworkState,
    Point,
    UavNode,
    UnknownNodeError,
    distance,
    step_toward,
)

coord = st.floats(-1e4, 1e4, allow_nan=False)
points = st.builds(Point, coord, coord)


@pytest.mark.parametrize("a, b, d", [
    ((0, 0), (3, 4), 5.0),
    ((7, -2), (7, -2), 0.0),
    ((-1, 0), (1, 0), 2.0),
])
def test_distance_examples(a, b, d):
    assert distance(Point(*a), Point(*b)) == d


@pytest.mark.parametrize("a, b, step, want", [
    ((0, 0), (10, 0), 1, (1, 0)),
    ((0, 0), (0.5, 0), 1, (0.5, 0)),
    ((2, 2), (2, 2), 1, (2, 2)),
])
def test_step_toward_examples(a, b, step, want):
    assert step_toward(Point(*a), Point(*b), step) == Point(*want)


def test_negative_step_rejected():
    with pytest.raises(ValueError):
        step_toward(Point(0, 0), Point(1, 0), -0.5)


@pytest.mark.parametrize("x, y", [(math.nan, 0.0), (0.0, math.inf)])
def test_point_must_be_finite(x, y):
    with pytest.raises(ValueError):
        Point(x, y)


def test_link_params_validated():
    with pytest.raises(ValueError):
        LinkParams(alpha=0.0)
    with pytest.raises(ValueError):
        LinkParams(d_min=-1.0)
    assert LinkParams.from_range(50.0).tau == pytest.approx(4e-4, rel=1e-15)
    assert LinkParams.from_range(50.0).direct_range(1.0) == pytest.approx(50.0)


def test_network_state_ids_and_lookup():
    s = NetworkState([UavNode(3, Point(0, 0)), UavNode(7, Point(1, 1))])
    assert s.node(7).pos == Point(1, 1)
    assert 3 in s and 4 not in s
    with pytest.raises(UnknownNodeError):
        s.node(4)
    with pytest.raises(ValueError):
        NetworkState([UavNode(1, Point(0, 0)), UavNode(1, Point(2, 2))])
    with pytest.raises(ValueError):
        UavNode(2, Point(0, 0), power=0.0)
    assert s.failed_pos is None


def test_copy_is_independent():
    s = NetworkState([UavNode(0, Point(0, 0))])
    c = s.copy()
    c.move(0, Point(5, 5))
    assert s.node(0).pos == Point(0, 0)


@given(points, points)
def test_distance_symmetric_nonnegative(a, b):
    assert distance(a, b) == distance(b, a) >= 0.0


@given(points, points, st.floats(0, 2e4))
def test_step_toward_remaining_distance(a, b, s):
    q = step_toward(a, b, s)
    assert distance(q, b) == pytest.approx(max(0.0, distance(a, b) - s), abs=1e-9)
    # never past the target
    assert distance(a, q) <= distance(a, b) + 1e-9
