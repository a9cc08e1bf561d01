"""Design direction: admissible power levels and throughput for given budgets.

Given a TVD budget delta, the Hellinger lower bound yields a *necessary*
upper limit on the SNR and the improved Hellinger upper bound a *sufficient*
one; the exact admissible maximum always sits inside that bracket and is
recovered by bisection on the exact TVD.  Throughput uses the Gaussian
normal approximation log M = nC - sqrt(nV) Q^{-1}(eps) + (1/2) log2 n, with
the O(1) term fixed to 0 so outputs are reproducible.

All throughput quantities in this module are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .channel_metrics import ChannelPoint, tvd_exact
from .errors import BracketError, DomainError, GridError, ToleranceNotReached
from .specfun import gauss_q_inv

__all__ = [
    "CovertBudget",
    "PowerBracket",
    "ThroughputReport",
    "power_necessary",
    "power_sufficient",
    "power_exact",
    "power_bracket",
    "capacity_bits",
    "dispersion_bits_sq",
    "throughput_normal",
    "throughput_bounds",
    "second_order_probe",
]

_LOG2E = 1.0 / math.log(2.0)
_BISECT_MAX_ITER = 200
_BRACKET_EXPANSIONS = 120


@dataclass(frozen=True)
class CovertBudget:
    """TVD budget at the adversary and average decoding error probability."""

    delta: float
    eps: float

    def __post_init__(self):
        for name, v in (("delta", self.delta), ("eps", self.eps)):
            if not (isinstance(v, (int, float)) and 0.0 < v < 1.0):
                raise DomainError(f"{name} must lie strictly inside (0, 1), got {v!r}")


@dataclass(frozen=True)
class PowerBracket:
    """Necessary / sufficient / exact SNR levels for one (n, delta).

    y and y0 are the auxiliary quantities (1/4)(1-delta)^(4/n) and
    (1/4)(1-delta^2)^(2/n); lam = sqrt(1-4y), lam1 = sqrt(1-4y0).  The SNRs
    satisfy theta_sufficient <= theta_exact <= theta_necessary.
    """

    theta_necessary: float
    theta_sufficient: float
    theta_exact: float
    y: float
    y0: float
    lam: float
    lam1: float


@dataclass(frozen=True)
class ThroughputReport:
    """Normal-approximation throughput and its covert upper/lower bounds (bits)."""

    capacity_bits: float
    dispersion: float
    log_m: float
    upper_bits: float
    lower_bits: float


def _validate_n_delta(n: int, delta: float) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError(f"blocklength n must be an integer >= 1, got {n!r}")
    if not (isinstance(delta, (int, float)) and 0.0 < delta < 1.0):
        raise DomainError(f"delta must lie strictly inside (0, 1), got {delta!r}")


def power_necessary(n: int, delta: float) -> float:
    """Largest SNR compatible with the Hellinger lower bound H^2 <= delta.

    theta = 2 lam / (1 - lam) with lam = sqrt(1 - (1-delta)^(4/n)), an exact
    rewrite of eta = (1 - 2y + sqrt(1-4y)) / (2y) that avoids the 1 - 4y
    cancellation at large n.
    """
    _validate_n_delta(n, delta)
    lam = math.sqrt(-math.expm1((4.0 / n) * math.log1p(-delta)))
    return 2.0 * lam / (1.0 - lam)


def power_sufficient(n: int, delta: float) -> float:
    """SNR guaranteed admissible by the improved Hellinger upper bound."""
    _validate_n_delta(n, delta)
    lam1 = math.sqrt(-math.expm1((2.0 / n) * math.log1p(-delta * delta)))
    return 2.0 * lam1 / (1.0 - lam1)


def power_exact(n: int, delta: float, tol: float = 1e-10) -> float:
    """Invert the exact TVD: the theta with tvd_exact(n, theta) = delta.

    Bisection over [power_sufficient, power_necessary] (TVD is increasing in
    theta, and the bracket provably contains the root since the two bound
    inversions pin H^2 resp. the improved upper bound to delta).  The
    bracket is expanded geometrically first if evaluation says otherwise.
    """
    _validate_n_delta(n, delta)
    if not (isinstance(tol, (int, float)) and tol > 0):
        raise DomainError(f"tol must be > 0, got {tol!r}")

    def resid(theta: float) -> float:
        return tvd_exact(ChannelPoint(n=n, theta=theta)) - delta

    lo = power_sufficient(n, delta)
    hi = power_necessary(n, delta)
    f_lo, f_hi = resid(lo), resid(hi)
    expansions = 0
    while f_lo > 0.0 and expansions < _BRACKET_EXPANSIONS:
        lo *= 0.5
        f_lo = resid(lo)
        expansions += 1
    while f_hi < 0.0 and expansions < _BRACKET_EXPANSIONS:
        hi *= 2.0
        f_hi = resid(hi)
        expansions += 1
    if f_lo > 0.0 or f_hi < 0.0:
        raise BracketError(
            f"could not bracket tvd = {delta!r} at n = {n}", lo=lo, hi=hi
        )

    best_theta, best_resid = (lo, abs(f_lo)) if abs(f_lo) < abs(f_hi) else (hi, abs(f_hi))
    for _ in range(_BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        f_mid = resid(mid)
        if abs(f_mid) < best_resid:
            best_theta, best_resid = mid, abs(f_mid)
        if abs(f_mid) <= tol:
            return mid
        if f_mid < 0.0:
            lo = mid
        else:
            hi = mid
    raise ToleranceNotReached(
        f"power_exact did not reach |tvd - delta| <= {tol!r} at n = {n}",
        best=best_theta, residual=best_resid,
    )


def power_bracket(n: int, delta: float, tol: float = 1e-10) -> PowerBracket:
    """All three power levels plus the auxiliary y/lambda quantities."""
    _validate_n_delta(n, delta)
    one_m_4y = -math.expm1((4.0 / n) * math.log1p(-delta))
    one_m_4y0 = -math.expm1((2.0 / n) * math.log1p(-delta * delta))
    lam = math.sqrt(one_m_4y)
    lam1 = math.sqrt(one_m_4y0)
    return PowerBracket(
        theta_necessary=2.0 * lam / (1.0 - lam),
        theta_sufficient=2.0 * lam1 / (1.0 - lam1),
        theta_exact=power_exact(n, delta, tol),
        y=0.25 * (1.0 - one_m_4y),
        y0=0.25 * (1.0 - one_m_4y0),
        lam=lam,
        lam1=lam1,
    )


def capacity_bits(theta: float) -> float:
    """AWGN capacity C = (1/2) log2(1 + theta), bits per channel use."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta!r}")
    return 0.5 * math.log1p(theta) * _LOG2E


def dispersion_bits_sq(theta: float) -> float:
    """Channel dispersion V = (theta/2)(theta+2)/(theta+1)^2 * (log2 e)^2."""
    if theta < 0:
        raise DomainError(f"theta must be >= 0, got {theta!r}")
    eta = 1.0 + theta
    return 0.5 * theta * (theta + 2.0) / (eta * eta) * _LOG2E * _LOG2E


def throughput_normal(n: int, eps: float, theta: float) -> float:
    """Normal-approximation throughput in bits for n channel uses.

    log M = n C - sqrt(n V) Q^{-1}(eps) + (1/2) log2 n, with the O(1) term
    fixed to 0.  At theta = 0 this degenerates to (1/2) log2 n.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise DomainError(f"blocklength n must be an integer >= 1, got {n!r}")
    if not (isinstance(eps, (int, float)) and 0.0 < eps < 1.0):
        raise DomainError(f"eps must lie strictly inside (0, 1), got {eps!r}")
    c = capacity_bits(theta)
    v = dispersion_bits_sq(theta)
    return n * c - math.sqrt(n * v) * gauss_q_inv(eps) + 0.5 * math.log2(n)


def throughput_bounds(n: int, budget: CovertBudget, tol: float = 1e-10) -> ThroughputReport:
    """Covert throughput bracket: upper/lower bounds plus the exact-power value.

    The upper bound pairs the necessary-condition SNR in the capacity term
    with the sufficient-condition SNR in the dispersion term; the lower
    bound swaps them.  Both carry the same (1/2) log2 n term.
    """
    theta_n = power_necessary(n, budget.delta)
    theta_s = power_sufficient(n, budget.delta)
    theta_x = power_exact(n, budget.delta, tol)
    qinv = gauss_q_inv(budget.eps)
    half_log = 0.5 * math.log2(n)
    upper = n * capacity_bits(theta_n) - math.sqrt(n * dispersion_bits_sq(theta_s)) * qinv \
        + half_log
    lower = n * capacity_bits(theta_s) - math.sqrt(n * dispersion_bits_sq(theta_n)) * qinv \
        + half_log
    return ThroughputReport(
        capacity_bits=capacity_bits(theta_x),
        dispersion=dispersion_bits_sq(theta_x),
        log_m=throughput_normal(n, budget.eps, theta_x),
        upper_bits=upper,
        lower_bits=lower,
    )


def _ols_loglog(ns: Sequence[float], values: Sequence[float]) -> float:
    xs = [math.log(v) for v in ns]
    ys = [math.log(v) for v in values]
    m = len(xs)
    mx = sum(xs) / m
    my = sum(ys) / m
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


def second_order_probe(budget: CovertBudget,
                       n_grid: Sequence[int]) -> tuple[float, float]:
    """Log-log slopes of the two upper-bound terms along a blocklength grid.

    Returns (slope of n C(theta_necessary), slope of sqrt(n V(theta_sufficient))
    * Q^{-1}(eps)); under budget-scaled powers these approach 1/2 and 1/4.
    """
    ns = sorted(set(int(n) for n in n_grid))
    if len(ns) < 5 or ns[0] < 1:
        raise GridError("second_order_probe needs >= 5 distinct blocklengths >= 1")
    if ns[-1] / ns[0] < 1e3:
        raise GridError("second_order_probe grid must span at least 3 decades")
    qinv = gauss_q_inv(budget.eps)
    if qinv <= 0.0:
        raise DomainError("second_order_probe needs eps < 1/2 (the dispersion "
                          "term vanishes or changes sign otherwise)")
    first = [n * capacity_bits(power_necessary(n, budget.delta)) for n in ns]
    second = [math.sqrt(n * dispersion_bits_sq(power_sufficient(n, budget.delta))) * qinv
              for n in ns]
    return _ols_loglog(ns, first), _ols_loglog(ns, second)
