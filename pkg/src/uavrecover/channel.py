"""Direct and cooperative (summed-SNR) link predicates.

The channel is path-loss only: the mean fading power is taken as 1, so a
link either exists or it does not for a given geometry.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import LinkParams, NetworkState, UavNode, distance


class LinkError(ValueError):
    pass


@dataclass(frozen=True)
class HelperSet:
    """A transmitting node plus the neighbours that relay the same packet."""

    anchor: int
    members: frozenset[int]

    def __post_init__(self):
        if self.anchor not in self.members:
            raise ValueError(f"anchor {self.anchor} missing from helper set")

    @classmethod
    def of(cls, anchor: int, *helpers: int) -> "HelperSet":
        return cls(anchor, frozenset((anchor, *helpers)))


def tau_from_range(power: float, noise: float, alpha: float, range_m: float) -> float:
    if min(power, noise, alpha, range_m) <= 0:
        raise ValueError("power, noise, alpha and range must all be positive")
    return power / (range_m ** alpha * noise)


def pairwise_snr(sender: UavNode, receiver: UavNode, params: LinkParams) -> float:
    d = max(distance(sender.pos, receiver.pos), params.d_min)
    return sender.power / (d ** params.alpha * params.noise)


def has_direct_link(sender: UavNode, receiver: UavNode, params: LinkParams) -> bool:
    if not (sender.alive and receiver.alive):
        raise LinkError(f"link query on dead node ({sender.id} -> {receiver.id})")
    return pairwise_snr(sender, receiver, params) >= params.tau


def cc_snr(senders: HelperSet, receiver: UavNode, state: NetworkState,
           params: LinkParams) -> float:
    if receiver.id in senders.members:
        raise LinkError(f"receiver {receiver.id} is inside the sender set")
    total = 0.0
    # sorted so the float sum is order-stable
    for m in sorted(senders.members):
        node = state.node(m)
        if not node.alive:
            raise LinkError(f"helper {m} is not alive")
        total += pairwise_snr(node, receiver, params)
    return total


def has_cc_link(senders: HelperSet, receiver: UavNode, state: NetworkState,
                params: LinkParams) -> bool:
    return cc_snr(senders, receiver, state, params) >= params.tau


def cc_margin(i: HelperSet, j: HelperSet, state: NetworkState, params: LinkParams) -> float:
    """Worst-direction SNR surplus over ``tau``; non-negative iff bidirectional."""
    if i.members & j.members:
        raise LinkError("helper sets overlap")
    forward = cc_snr(i, state.node(j.anchor), state, params)
    backward = cc_snr(j, state.node(i.anchor), state, params)
    return min(forward, backward) - params.tau


def bidirectional_cc(i: HelperSet, j: HelperSet, state: NetworkState,
                     params: LinkParams) -> bool:
    if i.members & j.members:
        raise LinkError("helper sets overlap")
    return (has_cc_link(i, state.node(j.anchor), state, params)
            and has_cc_link(j, state.node(i.anchor), state, params))
