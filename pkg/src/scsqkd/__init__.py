"""Finite-key secure-rate engine for side-channel-secure QKD.

Computes secure key rates of the vacuum/non-vacuum encoding protocol with
an untrusted middle node, under correlated source errors (logical windows
with trailing vacuum sub-pulses) and Trojan-horse back-reflection bounds,
and sweeps distance to locate the maximum secure reach.
"""

from .channel import ClickModel, click_probabilities, simulate_counts
from .chernoff import (BoundRequest, ConvergenceError, expected_lower,
                       expected_upper, observed_lower, observed_upper)
from .fidelity import (VacuousBoundError, VirtualIntensities,
                       fidelity_lower_bound, g_func, virtual_intensities)
from .keyrate import (PhaseFlipBound, bound_phase_flips, c2_bar,
                      entropy_binary, leak_ec_bits, phase_flip_expected_upper,
                      phase_flip_rate_upper, r_coherent, r_collective)
from .model import (ChannelParams, EpsilonBudget, ObservedCounts,
                    ProtocolParams, RatePoint, SourceBounds, ValidationError,
                    validate)
from .optimizer import (NoSecureDistanceError, Scenario, SweepSpec,
                        evaluate_point, max_distance, maximize_rate,
                        optimize_point, sweep)

__version__ = "0.1.0"

__all__ = [
    "BoundRequest", "ChannelParams", "ClickModel", "ConvergenceError",
    "EpsilonBudget", "NoSecureDistanceError", "ObservedCounts",
    "PhaseFlipBound", "ProtocolParams", "RatePoint", "Scenario",
    "SourceBounds", "SweepSpec", "VacuousBoundError", "ValidationError",
    "VirtualIntensities", "bound_phase_flips", "c2_bar",
    "click_probabilities", "entropy_binary", "evaluate_point",
    "expected_lower", "expected_upper", "fidelity_lower_bound", "g_func",
    "leak_ec_bits", "max_distance", "maximize_rate", "observed_lower",
    "observed_upper", "optimize_point", "phase_flip_expected_upper",
    "phase_flip_rate_upper", "r_coherent", "r_collective", "simulate_counts",
    "sweep", "validate", "virtual_intensities",
]
