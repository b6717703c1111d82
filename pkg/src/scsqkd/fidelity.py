"""Fidelity lower bounds and the virtual-intensity map.

The security argument replaces the real (correlated, probe-reflecting)
source with an equivalent perfect protocol whose coherent intensities
mu_A', mu_B' are fixed by e^{-mu'} = F_low, where F_low is the worst-case
fidelity between the two candidate logical-window states:

    F_low = [ G(s0, v0) * G(v0, v0)^xi * G(1 - mu_E, 1 - mu_E) ]^2
    G(alpha, beta) = sqrt(alpha*beta) - sqrt((1-alpha)(1-beta))

with s0 the send-state vacuum bound, v0 the non-ideal-vacuum bound, xi
trailing vacuum sub-pulses per logical window and mu_E the reflected-light
intensity cap.  G is evaluated through the algebraically equivalent
quotient (alpha + beta - 1) / (sqrt(alpha*beta) + sqrt((1-alpha)(1-beta)))
whose numerator is summed exactly, so the bound keeps full relative
precision even where the two square roots nearly cancel or the arguments
sit within 1e-10 of 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import SourceBounds, _finite, _require


class VacuousBoundError(ValueError):
    """The fidelity lower bound is <= 0: no secure mapping exists."""


@dataclass(frozen=True)
class VirtualIntensities:
    """Equivalent perfect-protocol intensities mu_A', mu_B'."""

    mu_a: float
    mu_b: float

    def __post_init__(self) -> None:
        for name in ("mu_a", "mu_b"):
            v = getattr(self, name)
            _require(_finite(v) and v >= 0.0, f"{name} must be finite and >= 0")


def g_func(alpha: float, beta: float) -> float:
    """G(alpha, beta) = sqrt(alpha*beta) - sqrt((1-alpha)(1-beta)).

    May be negative for small arguments.  Raises ValueError outside [0, 1].
    """
    if not (_finite(alpha) and 0.0 <= alpha <= 1.0):
        raise ValueError(f"g_func: alpha must lie in [0, 1], got {alpha!r}")
    if not (_finite(beta) and 0.0 <= beta <= 1.0):
        raise ValueError(f"g_func: beta must lie in [0, 1], got {beta!r}")
    num = math.fsum((alpha, beta, -1.0))
    den = math.sqrt(alpha * beta) + math.sqrt((1.0 - alpha) * (1.0 - beta))
    if den == 0.0:
        # both products vanish (e.g. alpha=0, beta=1): the difference is 0
        return 0.0
    return num / den


def _check_side(v0: float, s0: float, xi: int, mu_e: float) -> None:
    if not (_finite(v0) and 0.5 <= v0 <= 1.0):
        raise ValueError(f"v0 must lie in [0.5, 1], got {v0!r}")
    if not (_finite(s0) and 0.5 <= s0 <= 1.0):
        raise ValueError(f"s0 must lie in [0.5, 1], got {s0!r}")
    if not (isinstance(xi, int) and not isinstance(xi, bool) and xi >= 0):
        raise ValueError(f"xi must be a non-negative integer, got {xi!r}")
    if not (_finite(mu_e) and 0.0 <= mu_e < 1.0):
        raise ValueError(f"mu_e must lie in [0, 1), got {mu_e!r}")


def _log_bound(s0: float, v0: float, xi: int, mu_e: float) -> float:
    """ln of the squared fidelity product; raises if any factor is <= 0.

    The vacuum and Trojan factors collapse to G(x, x) = 2x - 1, so they are
    taken through log1p of the exactly-representable complements.
    """
    cv = 1.0 - v0            # exact: v0 in [0.5, 1]
    if 2.0 * cv >= 1.0:
        raise VacuousBoundError("no secure mapping: G(v0, v0) <= 0")
    if 2.0 * mu_e >= 1.0:
        raise VacuousBoundError("no secure mapping: Trojan factor G(1-mu_E, 1-mu_E) <= 0")
    if cv == 0.0:
        # ideal vacuum: G(s0, 1) = sqrt(s0) exactly
        log_g1 = 0.5 * math.log(s0)
        log_g2 = 0.0
    else:
        num = math.fsum((s0, v0, -1.0))
        if num <= 0.0:
            raise VacuousBoundError("no secure mapping: G(s0, v0) <= 0")
        den = math.sqrt(s0 * v0) + math.sqrt((1.0 - s0) * cv)
        log_g1 = math.log(num / den)
        log_g2 = math.log1p(-2.0 * cv)
    log_g3 = math.log1p(-2.0 * mu_e)
    return 2.0 * (log_g1 + xi * log_g2 + log_g3)


def fidelity_lower_bound(v0: float, s0: float, xi: int = 1, mu_e: float = 0.0) -> float:
    """Lower edge of the fidelity range for one side's logical-window states.

    ``v0`` is the non-ideal-vacuum overlap bound and ``s0`` the send-state
    vacuum bound; with xi = 1 and mu_e = 0 this is [G(s0,v0) G(v0,v0)]^2.
    Raises VacuousBoundError when the product inside the square is <= 0.
    """
    _check_side(v0, s0, xi, mu_e)
    return math.exp(_log_bound(s0, v0, xi, mu_e))


def virtual_intensities(bounds: SourceBounds) -> VirtualIntensities:
    """Map source bounds to the equivalent intensities mu_A' = -ln F_low^A,
    mu_B' = -ln F_low^B.

    Raises VacuousBoundError if either fidelity lower bound is <= 0 (the
    virtual intensity would be infinite: no secure mapping).
    """
    mu_a = -_log_bound(bounds.a0, bounds.av0, bounds.xi, bounds.mu_e)
    mu_b = -_log_bound(bounds.b0, bounds.bv0, bounds.xi, bounds.mu_e)
    # -0.0 from exactly-ideal sources
    return VirtualIntensities(mu_a=mu_a + 0.0, mu_b=mu_b + 0.0)
