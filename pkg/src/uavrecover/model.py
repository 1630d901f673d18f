"""Planar geometry, node records and shared link parameters."""

from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite coordinates: ({self.x}, {self.y})")

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y


@dataclass
class UavNode:
    id: int
    pos: Point
    alive: bool = True
    power: float = 1.0

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"node id must be non-negative, got {self.id}")
        if not self.power > 0:
            raise ValueError(f"node {self.id}: power must be positive")


@dataclass(frozen=True)
class LinkParams:
    """Radio constants shared by every link predicate.

    ``tau`` is the SNR threshold; ``d_min`` clamps distances so co-located
    nodes do not divide by zero.
    """

    alpha: float = 2.0
    noise: float = 1.0
    tau: float = 4.0e-4
    d_min: float = 0.1

    def __post_init__(self):
        for name in ("alpha", "noise", "tau", "d_min"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"LinkParams.{name} must be positive, got {value}")

    @classmethod
    def from_range(cls, range_m: float = 50.0, power: float = 1.0,
                   noise: float = 1.0, alpha: float = 2.0, d_min: float = 0.1) -> "LinkParams":
        """Calibrate ``tau`` so a node of ``power`` reaches exactly ``range_m``."""
        from .channel import tau_from_range

        return cls(alpha=alpha, noise=noise,
                   tau=tau_from_range(power, noise, alpha, range_m), d_min=d_min)

    def direct_range(self, power: float = 1.0) -> float:
        return (power / (self.tau * self.noise)) ** (1.0 / self.alpha)


class UnknownNodeError(KeyError):
    pass


@dataclass
class NetworkState:
    nodes: list[UavNode] = field(default_factory=list)
    failed_pos: Optional[Point] = None

    def __post_init__(self):
        self._index: dict[int, int] = {}
        self._reindex()

    def _reindex(self):
        index = {}
        for i, node in enumerate(self.nodes):
            if node.id in index:
                raise ValueError(f"duplicate node id {node.id}")
            index[node.id] = i
        self._index = index

    def node(self, node_id: int) -> UavNode:
        try:
            return self.nodes[self._index[node_id]]
        except KeyError:
            raise UnknownNodeError(node_id) from None

    def __contains__(self, node_id: int) -> bool:
        return node_id in self._index

    def alive_ids(self) -> list[int]:
        return sorted(n.id for n in self.nodes if n.alive)

    def positions(self, ids: Iterable[int]) -> dict[int, Point]:
        return {i: self.node(i).pos for i in ids}

    def move(self, node_id: int, pos: Point):
        self.node(node_id).pos = pos

    def copy(self) -> "NetworkState":
        return NetworkState(nodes=copy.deepcopy(self.nodes), failed_pos=self.failed_pos)


def distance(a: Point, b: Point) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    # plain sqrt keeps this bit-identical to the vectorised link matrix
    return math.sqrt(dx * dx + dy * dy)


def step_toward(origin: Point, target: Point, step: float) -> Point:
    """Advance from ``origin`` along the segment to ``target`` by at most ``step``.

    Never overshoots: if the target is closer than ``step`` the target itself
    is returned.
    """
    if step < 0:
        raise ValueError(f"step must be non-negative, got {step}")
    d = distance(origin, target)
    if d <= step:
        return target
    f = step / d
    return Point(origin.x + (target.x - origin.x) * f, origin.y + (target.y - origin.y) * f)
