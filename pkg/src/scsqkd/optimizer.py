"""Rate maximization over (mu, p_w), distance sweeps, and the maximum
secure distance.

The rate surface is smooth and unimodal in practice, so each distance is
optimized by a coarse grid search (log-spaced in mu, linear in p_w)
followed by rounds of golden-section line refinement per coordinate.  All
evaluations are pure, so sweep points can run on a process pool; results
are always assembled in input order, making output deterministic
regardless of completion order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial
from typing import Callable

from .channel import simulate_counts
from .fidelity import VacuousBoundError, virtual_intensities
from .keyrate import bound_phase_flips, r_coherent, r_collective
from .model import (ChannelParams, EpsilonBudget, ProtocolParams, RatePoint,
                    SourceBounds, _finite, _require)

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_REFINE_TOL = 1e-4

WORKERS_ENV = "SCSQKD_MAX_WORKERS"


class NoSecureDistanceError(RuntimeError):
    """The optimized rate is zero already at zero distance."""


@dataclass(frozen=True)
class SweepSpec:
    """Distance list and the (mu, p_w) search grids.

    Grids are (min, max, steps); a single-step grid with min == max pins
    that coordinate.  ``refine_iters`` counts golden-section rounds per
    coordinate after the coarse search.
    """

    distances_km: tuple[float, ...]
    mu_grid: tuple[float, float, int] = (1e-4, 1.0, 40)
    pw_grid: tuple[float, float, int] = (0.01, 0.6, 30)
    refine_iters: int = 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "distances_km", tuple(self.distances_km))
        for d in self.distances_km:
            _require(_finite(d) and d >= 0.0, "distances must be finite and >= 0")
        mu_lo, mu_hi, mu_n = self.mu_grid
        pw_lo, pw_hi, pw_n = self.pw_grid
        _require(0.0 < mu_lo <= mu_hi, "mu grid needs 0 < min <= max")
        _require(0.0 < pw_lo <= pw_hi < 1.0, "pw grid needs 0 < min <= max < 1")
        _require(isinstance(mu_n, int) and mu_n >= 1, "mu grid needs >= 1 steps")
        _require(isinstance(pw_n, int) and pw_n >= 1, "pw grid needs >= 1 steps")
        _require((mu_n > 1) or (mu_lo == mu_hi), "1-step mu grid needs min == max")
        _require((pw_n > 1) or (pw_lo == pw_hi), "1-step pw grid needs min == max")
        _require(isinstance(self.refine_iters, int) and self.refine_iters >= 0,
                 "refine_iters must be >= 0")


@dataclass(frozen=True)
class Scenario:
    """Everything that stays fixed during an optimization.

    ``bounds`` acts as a template: its a0/b0 are overwritten from the
    optimized mu (symmetric operation, a0 = b0 = e^-mu), while av0/bv0,
    mu_e and xi are taken as-is.  ``chan.distance_km`` and ``proto.p_w``
    are likewise replaced per evaluation.
    """

    bounds: SourceBounds
    chan: ChannelParams
    proto: ProtocolParams
    eps: EpsilonBudget


def _zero_point(chan: ChannelParams, proto: ProtocolParams, mu: float,
                note: str) -> RatePoint:
    return RatePoint(distance_km=chan.distance_km, mu=mu, p_w=proto.p_w,
                     mu_a_virtual=0.0, mu_b_virtual=0.0,
                     r_col=0.0, r_coh=0.0, r_phys=0.0, note=note)


def evaluate_point(bounds: SourceBounds, chan: ChannelParams,
                   proto: ProtocolParams, eps: EpsilonBudget,
                   mu: float) -> RatePoint:
    """Run the full pipeline at signal intensity ``mu``.

    Points with a vacuous fidelity bound (or with a0 = e^-mu pushed below
    the admissible 0.5) carry zero rate and an explanatory note instead of
    raising, so grid searches may roam freely.
    """
    if not (_finite(mu) and mu >= 0.0):
        raise ValueError(f"mu must be finite and >= 0, got {mu!r}")
    xi = bounds.xi
    a0 = math.exp(-mu)
    if a0 < 0.5:
        return _zero_point(chan, proto, mu, "a0 below 0.5 at this mu")
    b = replace(bounds, a0=a0, b0=a0)
    try:
        counts = simulate_counts(chan, proto, mu)
    except ValueError:
        return _zero_point(chan, proto, mu, "no effective windows")
    if counts.n_z == 0:
        return _zero_point(chan, proto, mu, "no untagged bits")
    try:
        vi = virtual_intensities(b)
    except VacuousBoundError:
        return _zero_point(chan, proto, mu, "no secure mapping (vacuous fidelity bound)")
    pf = bound_phase_flips(counts, proto, vi, log_fp=eps.log_eps_chernoff)
    r_col = r_collective(counts, proto, pf.e_ph_upper, eps)
    r_coh = r_coherent(r_col, proto)
    return RatePoint(distance_km=chan.distance_km, mu=mu, p_w=proto.p_w,
                     mu_a_virtual=vi.mu_a, mu_b_virtual=vi.mu_b,
                     r_col=r_col, r_coh=r_coh, r_phys=r_coh / (xi + 1))


def _grid(lo: float, hi: float, n: int) -> list[float]:
    if n == 1:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n - 1)] + [hi]


def _golden_max(f: Callable[[float], float], lo: float, hi: float,
                rel_tol: float) -> tuple[float, float]:
    """Deterministic golden-section maximization; returns best (x, f(x)) seen."""
    if hi <= lo:
        return lo, f(lo)
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    for _ in range(200):
        if (hi - lo) <= rel_tol * max(abs(lo), abs(hi), 1e-12):
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
            if fc > best_f:
                best_x, best_f = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
            if fd > best_f:
                best_x, best_f = d, fd
    return best_x, best_f


def maximize_rate(fn: Callable[[float, float], float],
                  spec: SweepSpec) -> tuple[float, float, float]:
    """Coarse grid search plus golden-section refinement of ``fn(mu, pw)``.

    Returns (mu, pw, value) for the best point ever evaluated, so the
    result is never worse than any coarse-grid sample.  Deterministic for
    a fixed spec.  ``fn`` is assumed rate-like (non-negative, zero when
    insecure): a grid whose best sample is <= 0 is returned as-is with the
    value clamped to 0, without refinement.
    """
    mu_lo, mu_hi, mu_n = spec.mu_grid
    pw_lo, pw_hi, pw_n = spec.pw_grid
    lmus = _grid(math.log(mu_lo), math.log(mu_hi), mu_n)
    mus = [mu_lo] if mu_n == 1 else [math.exp(lm) for lm in lmus]
    pws = _grid(pw_lo, pw_hi, pw_n)

    best_val, bi, bj = -math.inf, 0, 0
    for i, mu in enumerate(mus):
        for j, pw in enumerate(pws):
            v = fn(mu, pw)
            if v > best_val:
                best_val, bi, bj = v, i, j
    best_lmu, best_mu, best_pw = lmus[bi], mus[bi], pws[bj]

    if best_val <= 0.0:
        return best_mu, best_pw, max(best_val, 0.0)

    dl = (lmus[1] - lmus[0]) if mu_n > 1 else 0.0
    dp = (pws[1] - pws[0]) if pw_n > 1 else 0.0
    log_mu_min, log_mu_max = math.log(mu_lo), math.log(mu_hi)
    for _ in range(spec.refine_iters):
        if dl > 0.0:
            x, v = _golden_max(
                lambda lm: fn(math.exp(lm), best_pw),
                max(log_mu_min, best_lmu - dl), min(log_mu_max, best_lmu + dl),
                _REFINE_TOL)
            if v > best_val:
                best_val, best_lmu, best_mu = v, x, math.exp(x)
        if dp > 0.0:
            x, v = _golden_max(
                lambda p: fn(best_mu, p),
                max(pw_lo, best_pw - dp), min(pw_hi, best_pw + dp),
                _REFINE_TOL)
            if v > best_val:
                best_val, best_pw = v, x
    return best_mu, best_pw, best_val


def optimize_point(spec: SweepSpec, scenario: Scenario,
                   distance_km: float) -> RatePoint:
    """Maximize r_coh over (mu, p_w) at one distance."""
    chan = replace(scenario.chan, distance_km=distance_km)

    def fn(mu: float, pw: float) -> float:
        proto = replace(scenario.proto, p_w=pw)
        return evaluate_point(scenario.bounds, chan, proto, scenario.eps, mu).r_coh

    mu, pw, val = maximize_rate(fn, spec)
    proto = replace(scenario.proto, p_w=pw)
    point = evaluate_point(scenario.bounds, chan, proto, scenario.eps, mu)
    if point.r_coh <= 0.0 and not point.note:
        point = replace(point, note="insecure at this distance")
    return point


def sweep(spec: SweepSpec, scenario: Scenario,
          workers: int | None = None) -> list[RatePoint]:
    """Optimize every distance in ``spec``; output follows the input order.

    ``workers`` > 1 runs points on a process pool (default from the
    SCSQKD_MAX_WORKERS environment variable, else serial).
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or "1")
    distances = spec.distances_km
    if workers > 1 and len(distances) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(distances))) as pool:
            return list(pool.map(partial(optimize_point, spec, scenario), distances))
    return [optimize_point(spec, scenario, d) for d in distances]


def largest_positive_distance(rate_at: Callable[[float], float],
                              resolution_km: float,
                              probe_km: float = 100.0,
                              limit_km: float = 20000.0) -> float:
    """Bisect for the largest distance with rate > 0, to within
    ``resolution_km``; the returned distance is certified positive."""
    if not (_finite(resolution_km) and resolution_km > 0.0):
        raise ValueError("resolution_km must be positive")
    if rate_at(0.0) <= 0.0:
        raise NoSecureDistanceError("no secure distance")
    lo, hi = 0.0, probe_km
    while rate_at(hi) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > limit_km:
            raise NoSecureDistanceError(f"still secure beyond {limit_km} km")
    while hi - lo > resolution_km:
        mid = 0.5 * (lo + hi)
        if rate_at(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def max_distance(spec: SweepSpec, scenario: Scenario,
                 resolution_km: float) -> float:
    """Largest distance at which the optimized r_coh stays positive."""
    return largest_positive_distance(
        lambda d: optimize_point(spec, scenario, d).r_coh, resolution_km)
