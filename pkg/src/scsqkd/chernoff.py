"""Chernoff-bound solvers.

Four transcendental equations relate an observed count X to bounds on its
expectation (E^L, E^U) and an expectation Y to bounds on its realization
(O^U, O^L), each through a slack variable delta at failure probability fp:

    (e^{ d}/(1+d)^{1+d})^{X/(1+d)} = fp   ->  E^L = X/(1+d)
    (e^{-d}/(1-d)^{1-d})^{X/(1-d)} = fp   ->  E^U = X/(1-d)
    (e^{ d}/(1+d)^{1+d})^{Y}       = fp   ->  O^U = (1+d) Y
    (e^{-d}/(1-d)^{1-d})^{Y}       = fp   ->  O^L = (1-d) Y

Each equation is solved in log form, where it is continuous and strictly
decreasing in delta, by bracketed bisection with geometric expansion of
the initial bracket.  The log forms are arranged so the cancellation-prone
difference (e.g. d/(1+d) - log1p(d)) is taken between exactly-computed
terms, keeping the log-domain residual noise near machine epsilon times
the residual's own slope; bisection then runs until the bracket cannot
shrink at double precision (<= 200 iterations), which certifies the
defining equation far inside the 1e-9 * |log fp| contract.

Failure probabilities may be passed as ``fp`` or, when they underflow a
double (per-use epsilons behind the (N+1)^63 post-selection factor), as
``log_fp`` in natural-log space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .model import _finite

_MAX_ITER = 200
# safety net on the certified log-domain residual; the test suite checks
# the much tighter 1e-9 * |log fp| bound
_RESIDUAL_CAP = 1e-6


class ConvergenceError(RuntimeError):
    """The solver failed to bracket or converge; carries the residual."""


@dataclass(frozen=True)
class BoundRequest:
    """A validated (value, failure probability) pair, log-space canonical."""

    value: float
    log_fp: float

    def __post_init__(self) -> None:
        if not (_finite(self.value) and self.value >= 0.0):
            raise ValueError(f"value must be finite and >= 0, got {self.value!r}")
        if not (_finite(self.log_fp) and self.log_fp < 0.0):
            raise ValueError(
                f"log_fp must be finite and negative (fp in (0, 1)), got {self.log_fp!r}")

    @property
    def failure_prob(self) -> float:
        """Linear-space failure probability; may underflow to 0.0."""
        return math.exp(self.log_fp)


def _request(value: float, fp, log_fp) -> BoundRequest:
    if (fp is None) == (log_fp is None):
        raise ValueError("provide exactly one of fp and log_fp")
    if fp is not None:
        if not (_finite(fp) and 0.0 < fp < 1.0):
            raise ValueError(f"fp must lie in (0, 1), got {fp!r}")
        log_fp = math.log(fp)
    return BoundRequest(float(value), float(log_fp))


def _bisect_decreasing(f, lo, hi, f_lo, f_hi):
    """Root of a strictly decreasing f with f(lo) > 0 >= f(hi).

    Runs until the bracket cannot shrink further; returns the endpoint with
    the smaller |residual| and that residual.
    """
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        fm = f(mid)
        if fm > 0.0:
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    if abs(f_lo) <= abs(f_hi):
        return lo, f_lo
    return hi, f_hi


def _certify(residual: float, log_fp: float, op: str) -> None:
    if not (abs(residual) <= _RESIDUAL_CAP * max(1.0, abs(log_fp))):
        raise ConvergenceError(
            f"{op}: bisection left log-domain residual {residual:.6e} "
            f"(log fp = {log_fp:.6e})")


def expected_lower(value: float, fp: float | None = None, *,
                   log_fp: float | None = None) -> float:
    """E^L: largest expectation lower bound consistent with observing ``value``.

    Result lies in [0, value]; E^L(0) = 0.  When the slack variable exceeds
    the double range (value far below |log fp|) the bound underflows and 0
    is returned.
    """
    req = _request(value, fp, log_fp)
    x, lf = req.value, req.log_fp
    if x == 0.0:
        return 0.0
    f = lambda d: x * (d / (1.0 + d) - math.log1p(d)) - lf
    lo, f_lo = 0.0, -lf
    hi = 1.0
    f_hi = f(hi)
    while f_hi > 0.0:
        lo, f_lo = hi, f_hi
        hi *= 4.0
        if hi > 1e300:
            return 0.0
        f_hi = f(hi)
    d, res = _bisect_decreasing(f, lo, hi, f_lo, f_hi)
    _certify(res, lf, "expected_lower")
    return x / (1.0 + d)


def expected_upper(value: float, fp: float | None = None, *,
                   log_fp: float | None = None) -> float:
    """E^U: smallest expectation upper bound consistent with observing ``value``.

    Result is >= value; E^U(0) = ln(1/fp), the analytic limit of the
    defining equation as delta -> 1.
    """
    req = _request(value, fp, log_fp)
    x, lf = req.value, req.log_fp
    if x == 0.0:
        return -lf
    f = lambda d: x * (-d / (1.0 - d) - math.log1p(-d)) - lf
    lo, f_lo = 0.0, -lf
    gap = 0.5
    hi = 0.5
    f_hi = f(hi)
    while f_hi > 0.0:
        lo, f_lo = hi, f_hi
        gap *= 0.25
        new_hi = 1.0 - gap
        if new_hi <= hi or new_hi >= 1.0:
            raise ConvergenceError(
                f"expected_upper: root indistinguishable from delta = 1 "
                f"(value = {x:.3e}, log fp = {lf:.6e})")
        hi = new_hi
        f_hi = f(hi)
    d, res = _bisect_decreasing(f, lo, hi, f_lo, f_hi)
    _certify(res, lf, "expected_upper")
    return x / (1.0 - d)


def observed_upper(value: float, fp: float | None = None, *,
                   log_fp: float | None = None) -> float:
    """O^U: upper bound on the realization of an expectation ``value``.

    Result is >= value; the defining equation is degenerate at value = 0,
    which returns 0 with a RuntimeWarning.
    """
    req = _request(value, fp, log_fp)
    y, lf = req.value, req.log_fp
    if y == 0.0:
        warnings.warn("observed_upper: value = 0 makes the defining equation "
                      "degenerate; returning 0", RuntimeWarning, stacklevel=2)
        return 0.0
    f = lambda d: y * (d - (1.0 + d) * math.log1p(d)) - lf
    lo, f_lo = 0.0, -lf
    hi = 1.0
    f_hi = f(hi)
    while f_hi > 0.0:
        lo, f_lo = hi, f_hi
        hi *= 4.0
        if hi > 1e300:
            raise ConvergenceError(
                f"observed_upper: no bracket below delta = 1e300 "
                f"(value = {y:.3e}, log fp = {lf:.6e})")
        f_hi = f(hi)
    d, res = _bisect_decreasing(f, lo, hi, f_lo, f_hi)
    _certify(res, lf, "observed_upper")
    return (1.0 + d) * y


def observed_lower(value: float, fp: float | None = None, *,
                   log_fp: float | None = None) -> float:
    """O^L: lower bound on the realization of an expectation ``value``.

    Result lies in [0, value].  When even delta = 1 cannot push the tail
    probability down to fp (value <= ln(1/fp)) the bound saturates at 0.
    """
    req = _request(value, fp, log_fp)
    y, lf = req.value, req.log_fp
    if y == 0.0:
        warnings.warn("observed_lower: value = 0 makes the defining equation "
                      "degenerate; returning 0", RuntimeWarning, stacklevel=2)
        return 0.0

    def f(d: float) -> float:
        if d >= 1.0:
            return -y - lf  # limit: (1-d) log1p(-d) -> 0
        return y * (-d - (1.0 - d) * math.log1p(-d)) - lf

    if f(1.0) >= 0.0:
        return 0.0  # bound vacuous: delta_2' = 1
    d, res = _bisect_decreasing(f, 0.0, 1.0, -lf, -y - lf)
    _certify(res, lf, "observed_lower")
    return (1.0 - d) * y
