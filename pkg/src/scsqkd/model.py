"""Shared domain types for the SCS-QKD finite-key engine.

Every type is an immutable value object that validates its invariants on
construction, so instances are safe to share between concurrent workers.
Failure probabilities are carried in natural-log space end to end: the
post-selection factor (N+1)^63 puts the per-use epsilons far below the
smallest positive double for realistic block sizes (N ~ 1e14).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

_LOG6 = math.log(6.0)


class ValidationError(ValueError):
    """A configuration value violates a type invariant."""


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValidationError(message)


def _finite(x) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


@dataclass(frozen=True)
class SourceBounds:
    """Worst-case overlap bounds of the emitted states.

    ``a0``/``b0`` lower-bound the vacuum amplitude-squared of Alice's/Bob's
    send states, ``av0``/``bv0`` the vacuum overlap of the non-ideal vacuum
    states.  ``mu_e`` caps the intensity of back-reflected probe light per
    logical window, and ``xi`` is the source correlation length: each
    logical window carries ``xi`` trailing vacuum sub-pulses.
    """

    a0: float
    av0: float
    b0: float
    bv0: float
    mu_e: float = 0.0
    xi: int = 1

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        for name in ("a0", "av0", "b0", "bv0"):
            v = getattr(self, name)
            _require(_finite(v), f"{name} must be finite")
            _require(v <= 1.0, f"{name} above 1")
            _require(v >= 0.5, f"{name} below 0.5")
        _require(_finite(self.mu_e) and self.mu_e >= 0.0, "mu_e must be >= 0")
        _require(self.mu_e < 1.0, "mu_e must be < 1")
        _require(isinstance(self.xi, int) and not isinstance(self.xi, bool)
                 and self.xi >= 0, "xi must be a non-negative integer")

    @classmethod
    def from_intensities(cls, mu: float, mu_o: float, mu_e: float = 0.0,
                         xi: int = 1) -> "SourceBounds":
        """Symmetric bounds from intensities: a0 = b0 = e^-mu, av0 = bv0 = e^-mu_o.

        Requires mu, mu_o <= ln 2 so the resulting overlaps stay >= 0.5.
        """
        _require(_finite(mu) and mu >= 0.0, "mu must be >= 0")
        _require(_finite(mu_o) and mu_o >= 0.0, "mu_o must be >= 0")
        _require(mu <= math.log(2.0), "mu above ln 2 (a0 below 0.5)")
        _require(mu_o <= math.log(2.0), "mu_o above ln 2 (av0 below 0.5)")
        a0 = math.exp(-mu)
        av0 = math.exp(-mu_o)
        return cls(a0=a0, av0=av0, b0=a0, bv0=av0, mu_e=mu_e, xi=xi)


@dataclass(frozen=True)
class ChannelParams:
    """Fiber-and-detector parameters of the untrusted middle node."""

    distance_km: float
    alpha_f: float = 0.2   # fiber loss, dB/km
    eta_d: float = 0.60    # detector efficiency
    p_d: float = 1e-9      # dark-count probability per window
    e_d: float = 0.03      # misalignment-error probability

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        _require(_finite(self.distance_km) and self.distance_km >= 0.0,
                 "distance_km must be >= 0")
        _require(_finite(self.alpha_f) and self.alpha_f >= 0.0,
                 "alpha_f must be >= 0")
        _require(_finite(self.eta_d) and 0.0 < self.eta_d <= 1.0,
                 "eta_d must lie in (0, 1]")
        _require(_finite(self.p_d) and 0.0 <= self.p_d < 1.0,
                 "p_d must lie in [0, 1)")
        _require(_finite(self.e_d) and 0.0 <= self.e_d < 0.5,
                 "e_d must lie in [0, 0.5)")


@dataclass(frozen=True)
class ProtocolParams:
    """Block size and window-choice probabilities.

    ``n_windows`` counts logical windows.  ``d_dim`` is the dimension of the
    local states shared by the two parties; the protocol fixes it to 8.
    """

    n_windows: int
    p_w: float
    f_ec: float = 1.16
    d_dim: int = 8

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        _require(isinstance(self.n_windows, int) and not isinstance(self.n_windows, bool)
                 and self.n_windows > 0, "n_windows must be a positive integer")
        _require(_finite(self.p_w) and 0.0 < self.p_w < 1.0,
                 "p_w must lie in (0, 1)")
        _require(_finite(self.f_ec) and self.f_ec >= 1.0, "f_ec must be >= 1")
        _require(self.d_dim == 8, "d_dim is protocol-fixed to 8")

    @property
    def p_v(self) -> float:
        return 1.0 - self.p_w


@dataclass(frozen=True)
class ObservedCounts:
    """Post-error-correction observables: effective O/B/Z window counts and
    the raw-key bit-flip rate."""

    n_o: int
    n_b: int
    n_z: int
    e_z: float

    def __post_init__(self) -> None:
        for name in ("n_o", "n_b", "n_z"):
            v = getattr(self, name)
            _require(isinstance(v, int) and not isinstance(v, bool) and v >= 0,
                     f"{name} must be a non-negative integer")
        _require(_finite(self.e_z) and 0.0 <= self.e_z <= 1.0,
                 "e_z must lie in [0, 1]")

    @property
    def m_s(self) -> int:
        """Number of raw-key bits (all effective windows)."""
        return self.n_o + self.n_b + self.n_z


@dataclass(frozen=True)
class EpsilonBudget:
    """Security-failure allocations, stored as natural logs.

    The ``eps_*`` properties recover the linear values but underflow to 0.0
    for realistic block sizes; the log fields are authoritative.  The
    collective-attack coefficient is eps_cor + eps_bar + eps_pa +
    3*eps_chernoff, and the coherent-attack coefficient multiplies it by
    (N+1)^(d^2-1).
    """

    log_eps_cor: float
    log_eps_pa: float
    log_eps_bar: float
    log_eps_chernoff: float

    def __post_init__(self) -> None:
        for name in ("log_eps_cor", "log_eps_pa", "log_eps_bar", "log_eps_chernoff"):
            v = getattr(self, name)
            _require(_finite(v) and v < 0.0,
                     f"{name} must be finite and negative (epsilon in (0, 1))")

    @classmethod
    def from_values(cls, eps_cor: float, eps_pa: float, eps_bar: float,
                    eps_chernoff: float) -> "EpsilonBudget":
        vals = {"eps_cor": eps_cor, "eps_pa": eps_pa,
                "eps_bar": eps_bar, "eps_chernoff": eps_chernoff}
        for name, v in vals.items():
            _require(_finite(v) and 0.0 < v < 1.0, f"{name} must lie in (0, 1)")
        return cls(*(math.log(v) for v in vals.values()))

    @classmethod
    def for_coherent_target(cls, eps_coh: float, n_windows: int,
                            d_dim: int = 8) -> "EpsilonBudget":
        """Equal six-way split of eps_col = eps_coh / (N+1)^(d^2-1).

        eps_cor = eps_pa = eps_bar = eps_chernoff = eps_col / 6, the 3-eps
        Chernoff term taking the remaining three shares.
        """
        _require(_finite(eps_coh) and 0.0 < eps_coh < 1.0,
                 "eps_coh must lie in (0, 1)")
        _require(isinstance(n_windows, int) and n_windows > 0,
                 "n_windows must be a positive integer")
        log_col = math.log(eps_coh) - (d_dim * d_dim - 1) * math.log(n_windows + 1.0)
        share = log_col - _LOG6
        return cls(share, share, share, share)

    @property
    def eps_cor(self) -> float:
        return math.exp(self.log_eps_cor)

    @property
    def eps_pa(self) -> float:
        return math.exp(self.log_eps_pa)

    @property
    def eps_bar(self) -> float:
        return math.exp(self.log_eps_bar)

    @property
    def eps_chernoff(self) -> float:
        return math.exp(self.log_eps_chernoff)

    @property
    def log_eps_col(self) -> float:
        """log(eps_cor + eps_bar + eps_pa + 3 eps_chernoff), stable in log space."""
        terms = (self.log_eps_cor, self.log_eps_bar, self.log_eps_pa,
                 self.log_eps_chernoff + math.log(3.0))
        m = max(terms)
        return m + math.log(math.fsum(math.exp(t - m) for t in terms))

    def log_eps_coh(self, n_windows: int, d_dim: int = 8) -> float:
        """log of the coherent-attack coefficient at block size ``n_windows``."""
        return self.log_eps_col + (d_dim * d_dim - 1) * math.log(n_windows + 1.0)


@dataclass(frozen=True)
class RatePoint:
    """One evaluated operating point of the distance sweep."""

    distance_km: float
    mu: float
    p_w: float
    mu_a_virtual: float
    mu_b_virtual: float
    r_col: float
    r_coh: float
    r_phys: float
    note: str = ""

    def __post_init__(self) -> None:
        _require(_finite(self.distance_km) and self.distance_km >= 0.0,
                 "distance_km must be >= 0")
        for name in ("r_col", "r_coh", "r_phys"):
            v = getattr(self, name)
            _require(_finite(v) and v >= 0.0, f"{name} must be finite and >= 0")
        _require(self.r_coh <= self.r_col, "r_coh exceeds r_col")
        for name in ("mu_a_virtual", "mu_b_virtual"):
            v = getattr(self, name)
            _require(isinstance(v, (int, float)) and not math.isnan(v) and v >= 0.0,
                     f"{name} must be >= 0")


def validate(bounds: SourceBounds, chan: ChannelParams,
             proto: ProtocolParams) -> tuple[SourceBounds, ChannelParams, ProtocolParams]:
    """Re-check every invariant and hand the configuration back.

    Constructed instances are already validated; this re-applies the checks
    so stale or hand-patched objects fail loudly.  Idempotent.
    """
    for obj in (bounds, chan, proto):
        obj.validate()
    return bounds, chan, proto
