"""Convergence-rate verification along the power-scaling path theta = c n^(-tau).

Sweeps evaluate a chosen divergence quantity on a blocklength grid and the
fit operations recover the predicted rates:

* tau < 1/2: 1 - TVD decays like exp(-coef * n^p) with p = 1 - 2 tau
  (fit of ln(-ln(1-V)) against ln n);
* tau > 1/2: TVD decays like a power law whose log-log slope lies between
  1 - 2 tau and (1 - 2 tau)/2, and the squared Hellinger distance decays
  with slope exactly 1 - 2 tau.

Fits are ordinary least squares on log-transformed data over the largest-n
half of the grid, since the claims are n -> infinity statements and small-n
points bias the slope.  Points whose values have left the representable
range are dropped before fitting (the swept quantities are all computed
directly from regularized tails, so they stay meaningful down to ~1e-300).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .channel_metrics import ChannelPoint, alpha_beta, hellinger_sq, kl_pair, tvd_exact
from .errors import DomainError, GridError

__all__ = [
    "Quantity",
    "FitModel",
    "SweepSpec",
    "RateFit",
    "sweep",
    "fit_subhalf",
    "fit_superhalf",
    "kl_asymptote_check",
]

_LN2 = math.log(2.0)
_VALUE_FLOOR = 1e-300


class Quantity(str, Enum):
    TVD = "tvd"
    ONE_MINUS_TVD = "one_minus_tvd"
    KL_REV = "kl_rev"
    KL_FWD = "kl_fwd"
    H_SQ = "h_sq"


class FitModel(str, Enum):
    POWER_LAW = "power_law"          # A * n^p
    STRETCHED_EXP = "stretched_exp"  # A * exp(-coef * n^p)


@dataclass(frozen=True)
class SweepSpec:
    """Scaling exponent, constant, grid and quantity of one sweep."""

    tau: float
    n_grid: tuple[int, ...]
    quantity: Quantity = Quantity.TVD
    c: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.tau, (int, float)) and 0.0 < self.tau < 1.0):
            raise DomainError(f"tau must lie in (0, 1), got {self.tau!r}")
        if not (isinstance(self.c, (int, float)) and self.c > 0):
            raise DomainError(f"c must be > 0, got {self.c!r}")
        ns = tuple(self.n_grid)
        if len(ns) < 5:
            raise GridError("n_grid needs at least 5 points")
        if any(not isinstance(n, int) or n < 1 for n in ns):
            raise GridError("n_grid entries must be integers >= 1")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise GridError("n_grid must be strictly increasing")
        object.__setattr__(self, "n_grid", ns)


@dataclass(frozen=True)
class RateFit:
    """Fitted rate model; p is the exponent, coef the A or c constant."""

    model: FitModel
    p: float
    coef: float
    r_squared: float
    n_used: int


def _evaluate(spec: SweepSpec, n: int) -> float:
    cp = ChannelPoint.from_tau(n, spec.tau, spec.c)
    if spec.quantity == Quantity.TVD:
        return tvd_exact(cp)
    if spec.quantity == Quantity.ONE_MINUS_TVD:
        # alpha + beta, computed from the regularized tails directly rather
        # than by subtraction from 1, so tiny values keep full precision
        pair = alpha_beta(cp)
        return pair.alpha + pair.beta
    if spec.quantity == Quantity.H_SQ:
        return hellinger_sq(cp)
    kl_fwd, kl_rev = kl_pair(cp)
    return kl_fwd if spec.quantity == Quantity.KL_FWD else kl_rev


def sweep(spec: SweepSpec) -> list[tuple[int, float]]:
    """Evaluate the requested quantity at every grid point, ordered by n."""
    return [(n, _evaluate(spec, n)) for n in spec.n_grid]


def _ols(xs: Sequence[float], ys: Sequence[float]) -> tuple[float, float, float]:
    m = len(xs)
    mx = sum(xs) / m
    my = sum(ys) / m
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        raise GridError("degenerate fit grid (zero spread in log n)")
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_res = sum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    ss_tot = sum((y - my) ** 2 for y in ys)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def _upper_half(rows: list[tuple[int, float]]) -> list[tuple[int, float]]:
    if len(rows) < 4:
        raise GridError(f"only {len(rows)} usable sweep points remain (need >= 4)")
    return rows[len(rows) // 2:]


def fit_subhalf(spec: SweepSpec) -> RateFit:
    """Fit 1 - V ~ exp(-coef * n^p) for tau < 1/2.

    Linear regression of ln(-ln(1-V)) on ln n over the largest-n half;
    points where the quantity has saturated out of the representable range
    are dropped first.
    """
    if spec.tau >= 0.5:
        raise DomainError("fit_subhalf requires tau < 1/2")
    if spec.quantity != Quantity.ONE_MINUS_TVD:
        raise DomainError("fit_subhalf expects quantity = ONE_MINUS_TVD")
    rows = [(n, v) for n, v in sweep(spec) if _VALUE_FLOOR < v < 1.0]
    kept = _upper_half(rows)
    xs = [math.log(n) for n, _ in kept]
    ys = [math.log(-math.log(v)) for _, v in kept]
    slope, intercept, r2 = _ols(xs, ys)
    return RateFit(model=FitModel.STRETCHED_EXP, p=slope, coef=math.exp(intercept),
                   r_squared=r2, n_used=len(kept))


def fit_superhalf(spec: SweepSpec) -> RateFit:
    """Fit the power-law decay of a quantity for tau > 1/2.

    Log-log slope over the largest-n half.  Intended for TVD (slope inside
    [1 - 2 tau, (1 - 2 tau)/2]) and H_SQ (slope 1 - 2 tau).
    """
    if spec.tau <= 0.5:
        raise DomainError("fit_superhalf requires tau > 1/2")
    rows = [(n, v) for n, v in sweep(spec) if v > _VALUE_FLOOR]
    kept = _upper_half(rows)
    xs = [math.log(n) for n, _ in kept]
    ys = [math.log(v) for _, v in kept]
    slope, intercept, r2 = _ols(xs, ys)
    return RateFit(model=FitModel.POWER_LAW, p=slope, coef=math.exp(intercept),
                   r_squared=r2, n_used=len(kept))


def kl_asymptote_check(spec: SweepSpec) -> list[tuple[int, float, float]]:
    """Reverse K-L divergence in bits against its small-theta asymptote.

    Rows are (n, exact kl_rev in bits, c^2 n^(1-2 tau) / (4 ln 2)); the
    ratio tends to 1 from below as n grows when tau > 1/2.  tau = 1/2 is
    accepted as the boundary case whose asymptote is the constant
    c^2 / (4 ln 2).  This is a reporting-layer operation, hence the
    explicit bits conversion.
    """
    if spec.tau < 0.5:
        raise DomainError("kl_asymptote_check requires tau >= 1/2")
    out = []
    for n in spec.n_grid:
        cp = ChannelPoint.from_tau(n, spec.tau, spec.c)
        _, kl_rev = kl_pair(cp)
        asymptote = spec.c * spec.c * float(n) ** (1.0 - 2.0 * spec.tau) / (4.0 * _LN2)
        out.append((n, kl_rev / _LN2, asymptote))
    return out
