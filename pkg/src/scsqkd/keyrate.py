"""Phase-flip error bound and the finite-key secure rates.

From the effective-window counts and the virtual intensities this module
builds the upper bound on the phase-flip error rate of the untagged bits
and turns it into the collective-attack rate R_col and, after the
post-selection shortening, the coherent-attack rate R_coh (both in bits
per logical window, clamped at zero).

Each rate evaluation consumes the Chernoff failure probability three
times: two expected-value estimates (O and B counts) and one
realized-value estimate (phase-flip errors), matching the 3-epsilon share
of the collective budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import chernoff
from .fidelity import VirtualIntensities
from .model import EpsilonBudget, ObservedCounts, ProtocolParams, _finite, _require

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class PhaseFlipBound:
    """Coupling coefficient and the chained phase-flip bounds."""

    c2_bar: float
    n_ph_expected_upper: float
    n_ph_upper: float
    e_ph_upper: float

    def __post_init__(self) -> None:
        for name in ("c2_bar", "n_ph_expected_upper", "n_ph_upper", "e_ph_upper"):
            v = getattr(self, name)
            _require(_finite(v) and v >= 0.0, f"{name} must be finite and >= 0")
        _require(self.e_ph_upper <= 1.0, "e_ph_upper must be clamped to [0, 1]")


def entropy_binary(x: float) -> float:
    """Binary Shannon entropy H(x) = -x log2 x - (1-x) log2(1-x).

    Inputs are clamped to [0, 1] within 1e-15 slack to absorb rounding;
    anything further outside raises ValueError.
    """
    if not (_finite(x) and -1e-15 <= x <= 1.0 + 1e-15):
        raise ValueError(f"entropy_binary: argument must lie in [0, 1], got {x!r}")
    x = min(1.0, max(0.0, x))
    if x == 0.0 or x == 1.0:
        return 0.0
    return -(x * math.log2(x) + (1.0 - x) * math.log1p(-x) / _LN2)


def c2_bar(vi: VirtualIntensities) -> float:
    """Coupling coefficient 2 sqrt((1 - e^{-mu_A/2})(1 - e^{-mu_B/2})) in [0, 2)."""
    return 2.0 * math.sqrt(math.expm1(-0.5 * vi.mu_a) * math.expm1(-0.5 * vi.mu_b))


def phase_flip_expected_upper(counts: ObservedCounts, proto: ProtocolParams,
                              c2: float, fp: float | None = None, *,
                              log_fp: float | None = None) -> float:
    """Upper bound on the expected number of phase-flip errors.

    Chains E^U over the O and B counts into the six-term expansion

        (p_v p_w / 2) [ <n_O>^U/p_v^2 + <n_B>^U/p_w^2
                        + (2 c2/p_v) sqrt(N <n_O>^U) + (2 c2/p_w) sqrt(N <n_B>^U)
                        + (2/(p_v p_w)) sqrt(<n_O>^U <n_B>^U) + c2^2 N ].
    """
    _require(counts.m_s <= proto.n_windows, "m_s exceeds n_windows")
    if not (_finite(c2) and 0.0 <= c2 < 2.0):
        raise ValueError(f"c2 must lie in [0, 2), got {c2!r}")
    eu_o = chernoff.expected_upper(counts.n_o, fp, log_fp=log_fp)
    eu_b = chernoff.expected_upper(counts.n_b, fp, log_fp=log_fp)
    pv, pw = proto.p_v, proto.p_w
    n = float(proto.n_windows)
    return (pv * pw / 2.0) * (
        eu_o / (pv * pv)
        + eu_b / (pw * pw)
        + (2.0 * c2 / pv) * math.sqrt(n * eu_o)
        + (2.0 * c2 / pw) * math.sqrt(n * eu_b)
        + (2.0 / (pv * pw)) * math.sqrt(eu_o * eu_b)
        + c2 * c2 * n
    )


def phase_flip_rate_upper(n_ph_expected: float, n_z: int,
                          fp: float | None = None, *,
                          log_fp: float | None = None) -> float:
    """Upper bound on the realized phase-flip error rate, clamped to [0, 1]."""
    if n_z <= 0:
        raise ValueError("no untagged bits (n_z = 0)")
    if n_ph_expected == 0.0:
        return 0.0
    return min(1.0, chernoff.observed_upper(n_ph_expected, fp, log_fp=log_fp) / n_z)


def bound_phase_flips(counts: ObservedCounts, proto: ProtocolParams,
                      vi: VirtualIntensities, fp: float | None = None, *,
                      log_fp: float | None = None) -> PhaseFlipBound:
    """Full phase-flip chain at the given virtual intensities."""
    if counts.n_z <= 0:
        raise ValueError("no untagged bits (n_z = 0)")
    c2 = c2_bar(vi)
    n_ph_exp = phase_flip_expected_upper(counts, proto, c2, fp, log_fp=log_fp)
    if n_ph_exp == 0.0:
        n_ph = 0.0
    else:
        n_ph = chernoff.observed_upper(n_ph_exp, fp, log_fp=log_fp)
    return PhaseFlipBound(c2_bar=c2, n_ph_expected_upper=n_ph_exp,
                          n_ph_upper=n_ph,
                          e_ph_upper=min(1.0, n_ph / counts.n_z))


def leak_ec_bits(counts: ObservedCounts, proto: ProtocolParams) -> float:
    """Error-correction leakage f * M_s * H(E_Z) in bits."""
    return proto.f_ec * counts.m_s * entropy_binary(counts.e_z)


def r_collective(counts: ObservedCounts, proto: ProtocolParams, e_ph: float,
                 eps: EpsilonBudget) -> float:
    """Secure rate against collective attacks, bits per logical window.

    A phase-flip bound at or above 1/2 yields zero: privacy amplification
    cannot distill past the symmetric point, and H() stops being a
    meaningful penalty there.  Negative raw values clamp to zero.
    """
    if not (_finite(e_ph) and 0.0 <= e_ph <= 1.0):
        raise ValueError(f"e_ph must lie in [0, 1], got {e_ph!r}")
    if e_ph >= 0.5:
        return 0.0
    bits_cor = 1.0 - eps.log_eps_cor / _LN2        # log2(2/eps_cor)
    bits_pa = -2.0 * eps.log_eps_pa / _LN2         # 2 log2(1/eps_PA)
    bits_bar = 1.0 - eps.log_eps_bar / _LN2        # log2(2/eps_bar)
    d = proto.d_dim
    raw = (counts.n_z * (1.0 - entropy_binary(e_ph))
           - leak_ec_bits(counts, proto)
           - bits_cor - bits_pa
           - (d + 3.0) * math.sqrt(counts.n_z * bits_bar))
    return max(0.0, raw / proto.n_windows)


def r_coherent(r_col: float, proto: ProtocolParams) -> float:
    """Coherent-attack rate: shorten by the post-selection term
    2 (d^2 - 1) log2(N+1) / N, clamped at zero."""
    if not (_finite(r_col) and r_col >= 0.0):
        raise ValueError(f"r_col must be finite and >= 0, got {r_col!r}")
    n = proto.n_windows
    d = proto.d_dim
    return max(0.0, r_col - 2.0 * (d * d - 1.0) * math.log2(n + 1.0) / n)
