"""Connectivity recovery for partitioned UAV networks using cooperative relaying."""

from .channel import (
    HelperSet,
    bidirectional_cc,
    cc_snr,
    has_cc_link,
    has_direct_link,
    pairwise_snr,
    tau_from_range,
)
from .engine import RecoveryLimits, RecoveryReport
from .model import LinkParams, NetworkState, Point, UavNode, distance, step_toward
from .recovery import assess_failure, run_recovery
from .simulator import Scenario, make_scenario, simulate

__all__ = [
    "HelperSet", "LinkParams", "NetworkState", "Point", "RecoveryLimits", "RecoveryReport",
    "Scenario", "UavNode", "assess_failure", "bidirectional_cc", "cc_snr", "distance",
    "has_cc_link", "has_direct_link", "make_scenario", "pairwise_snr", "run_recovery",
    "simulate", "step_toward", "tau_from_range",
]
