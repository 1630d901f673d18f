"""Tick bookkeeping shared by every recovery algorithm."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .model import NetworkState, Point, distance


class InvariantViolation(AssertionError):
    """A committed tick split a component that was connected before it."""


@dataclass(frozen=True)
class RecoveryLimits:
    speed: float = 1.0
    tick: float = 1.0
    max_ticks: int = 10_000
    detection_delay: int = 0
    check_invariants: bool = False
    record_trace: bool = True

    def __post_init__(self):
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if not self.tick > 0:
            raise ValueError("tick must be positive")
        if self.max_ticks < 0 or self.detection_delay < 0:
            raise ValueError("max_ticks and detection_delay must be non-negative")

    @property
    def step(self) -> float:
        return self.speed * self.tick


@dataclass
class MoveLog:
    lengths: dict[int, float] = field(default_factory=dict)
    ticks: int = 0

    def record(self, node_id: int, length: float):
        if length > 0:
            self.lengths[node_id] = self.lengths.get(node_id, 0.0) + length

    def moved(self, node_id: int) -> bool:
        return self.lengths.get(node_id, 0.0) > 0

    @property
    def nodes_moved(self) -> int:
        return sum(1 for v in self.lengths.values() if v > 0)

    @property
    def total_distance(self) -> float:
        return math.fsum(self.lengths[k] for k in sorted(self.lengths))


@dataclass(frozen=True)
class TraceRecord:
    tick: int
    phase: str
    moves: tuple[tuple[int, float, float], ...]

    def as_dict(self) -> dict:
        return {"tick": self.tick, "phase": self.phase,
                "moves": [{"id": i, "x": x, "y": y} for i, x, y in self.moves]}


@dataclass(frozen=True)
class RecoveryReport:
    algorithm: str
    success: bool
    nodes_moved: int = 0
    total_distance: float = 0.0
    recovery_ticks: int = 0
    bridges: tuple[tuple[int, int], ...] = ()
    trace: tuple[TraceRecord, ...] = ()
    final_phase: str = "Done"
    path_lengths: tuple[tuple[int, float], ...] = ()


class TickEngine:
    """Commits synchronous per-tick moves onto a state and keeps the books."""

    def __init__(self, state: NetworkState, limits: RecoveryLimits):
        self.state = state
        self.limits = limits
        self.log = MoveLog()
        self.trace: list[TraceRecord] = []
        self._pending: dict[int, Point] = {}

    def apply(self, moves: dict[int, Point]) -> dict[int, Point]:
        """Apply ``moves`` immediately and return the previous positions."""
        old = {}
        for i, p in moves.items():
            old[i] = self.state.node(i).pos
            self.state.move(i, p)
        return old

    def revert(self, old: dict[int, Point]):
        for i, p in old.items():
            self.state.move(i, p)

    def commit(self, old: dict[int, Point]):
        """Book the moves whose prior positions are in ``old``."""
        for i, prev in old.items():
            cur = self.state.node(i).pos
            self.log.record(i, distance(prev, cur))
            self._pending[i] = cur

    @property
    def tick_has_moves(self) -> bool:
        return bool(self._pending)

    def end_tick(self, phase: str) -> bool:
        """Close the tick; returns False (and records nothing) if nothing moved."""
        if not self._pending:
            return False
        self.log.ticks += 1
        if self.limits.record_trace:
            moves = tuple((i, p.x, p.y) for i, p in sorted(self._pending.items()))
            self.trace.append(TraceRecord(self.log.ticks, phase, moves))
        self._pending = {}
        return True

    @property
    def out_of_ticks(self) -> bool:
        return self.log.ticks >= self.limits.max_ticks

    def report(self, algorithm: str, success: bool, bridges=(), final_phase: Optional[str] = None
               ) -> RecoveryReport:
        return RecoveryReport(
            algorithm=algorithm,
            success=success,
            nodes_moved=self.log.nodes_moved,
            total_distance=self.log.total_distance,
            recovery_ticks=self.log.ticks,
            bridges=tuple(bridges),
            trace=tuple(self.trace),
            final_phase=final_phase or ("Done" if success else "Failed"),
            path_lengths=tuple(sorted(self.log.lengths.items())),
        )
