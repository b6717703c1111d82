"""Linear-model channel simulator.

Produces the mean effective-window counts that feed the rate formulas.
The middle node sits halfway, so each arm spans L/2 and the one-arm
transmittance folds in the detector efficiency:

    eta = eta_d * 10^(-alpha_f (L/2) / 10)

Right-detector click probabilities per logical-window class: O windows
(both vacuum) click only on dark counts; a Z window's lone coherent pulse
splits half its intensity to each port; a B window's two interfering
pulses leak the misaligned fraction e_d of their total intensity 2*mu*eta
to the right port.  With the bit conventions of the protocol every
effective O and B window is a raw-key error and every effective Z window
is correct, so E_Z = (n_O + n_B) / M_s.

Counts are expectation values rounded half-up to integers; no sampling
noise, dead time or afterpulsing.  Trojan-horse reflections do not alter
the simulated counts (they enter only through the fidelity map), and the
non-ideal-vacuum intensity is far too small to contribute clicks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import ChannelParams, ObservedCounts, ProtocolParams, _finite, _require


@dataclass(frozen=True)
class ClickModel:
    """One-arm transmittance and per-window-class right-detector click
    probabilities."""

    eta: float
    p_click_o: float
    p_click_b: float
    p_click_z: float

    def __post_init__(self) -> None:
        _require(_finite(self.eta) and 0.0 < self.eta <= 1.0,
                 "eta must lie in (0, 1]")
        for name in ("p_click_o", "p_click_b", "p_click_z"):
            v = getattr(self, name)
            _require(_finite(v) and 0.0 <= v <= 1.0,
                     f"{name} must lie in [0, 1]")


def click_probabilities(chan: ChannelParams, mu: float) -> ClickModel:
    """Click model for signal intensity ``mu`` per logical window."""
    if not (_finite(mu) and mu >= 0.0):
        raise ValueError(f"mu must be finite and >= 0, got {mu!r}")
    eta = chan.eta_d * 10.0 ** (-chan.alpha_f * (chan.distance_km / 2.0) / 10.0)
    q = 1.0 - chan.p_d
    p_z = q * (-math.expm1(-mu * eta / 2.0)) + chan.p_d
    p_b = q * (-math.expm1(-2.0 * mu * eta * chan.e_d)) + chan.p_d
    return ClickModel(eta=eta, p_click_o=chan.p_d, p_click_b=p_b, p_click_z=p_z)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def simulate_counts(chan: ChannelParams, proto: ProtocolParams,
                    mu: float) -> ObservedCounts:
    """Mean effective-window counts over ``proto.n_windows`` logical windows.

    Raises ValueError when no window is effective (M_s = 0).
    """
    clicks = click_probabilities(chan, mu)
    n = proto.n_windows
    pv, pw = proto.p_v, proto.p_w
    n_o = _round_half_up(n * pv * pv * clicks.p_click_o)
    n_b = _round_half_up(n * pw * pw * clicks.p_click_b)
    n_z = _round_half_up(n * 2.0 * pv * pw * clicks.p_click_z)
    m_s = n_o + n_b + n_z
    if m_s == 0:
        raise ValueError("no effective windows")
    _require(m_s <= n, "effective windows exceed n_windows")
    return ObservedCounts(n_o=n_o, n_b=n_b, n_z=n_z, e_z=(n_o + n_b) / m_s)
