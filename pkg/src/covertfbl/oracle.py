"""Independent ground truth for the exact TVD formula.

Two oracles, deliberately on different computational paths than
``tvd_exact``:

* :func:`mc_tvd` simulates the optimal energy detector.  Observation
  energies are drawn directly as gamma variates (the energy of n i.i.d.
  Gaussians is a scaled chi-square), so a sample costs O(1) regardless of n
  and blocklengths of 1e6 are cheap.  Chunked counter-derived substreams
  make the estimate bit-identical however many workers run the chunks.

* :func:`quad_tvd` integrates the difference of the two energy densities
  over the acceptance region [0, R^2] by adaptive quadrature, with the
  integrand evaluated in log space.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .channel_metrics import ChannelPoint, thresholds
from .errors import DomainError, QuadratureError

__all__ = ["McConfig", "McEstimate", "mc_tvd", "quad_tvd", "worker_count"]


def worker_count() -> int:
    """Worker cap from COVERT_FBL_THREADS (default 1, always >= 1)."""
    raw = os.environ.get("COVERT_FBL_THREADS", "1").strip()
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class McConfig:
    """Sample count per hypothesis, master seed and chunk size."""

    samples: int
    seed: int = 0
    chunk: int = 250_000

    def __post_init__(self):
        if not isinstance(self.samples, int) or self.samples < 10_000:
            raise DomainError(
                f"samples must be an integer >= 10000 for a reportable estimate, "
                f"got {self.samples!r}"
            )
        if not isinstance(self.seed, int) or not (0 <= self.seed < 2 ** 64):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not isinstance(self.chunk, int) or self.chunk < 1:
            raise DomainError(f"chunk must be an integer >= 1, got {self.chunk!r}")


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo operating point; tvd_hat = 1 - alpha_hat - beta_hat."""

    tvd_hat: float
    std_err: float
    alpha_hat: float
    beta_hat: float


def _chunk_counts(cp: ChannelPoint, cfg: McConfig, index: int, size: int,
                  r_sq: float) -> tuple[int, int]:
    """False-alarm / missed-detection counts for one substream chunk."""
    rng = np.random.Generator(np.random.Philox(
        np.random.SeedSequence(entropy=cfg.seed, spawn_key=(index,))))
    shape = 0.5 * cp.n
    noise = rng.gamma(shape, 2.0 * cp.sigma_sq, size=size)
    false_alarms = int(np.count_nonzero(noise > r_sq))
    signal = rng.gamma(shape, 2.0 * cp.sigma_sq * (1.0 + cp.theta), size=size)
    missed = int(np.count_nonzero(signal <= r_sq))
    return false_alarms, missed


def mc_tvd(cp: ChannelPoint, cfg: McConfig) -> McEstimate:
    """Monte Carlo estimate of the detector operating point and TVD.

    Declares "transmitting" when the observation energy exceeds R^2.  At
    theta = 0 the threshold degenerates to its limit n sigma^2 and the two
    hypotheses coincide, so tvd_hat fluctuates around 0.  The reduction is
    a sum of per-chunk integer counts, hence order-independent: identical
    (seed, samples, chunk) give a bit-identical estimate at any worker
    count.
    """
    r_sq = cp.n * cp.sigma_sq if cp.theta == 0 else thresholds(cp).r_sq
    sizes = []
    remaining = cfg.samples
    while remaining > 0:
        sizes.append(min(cfg.chunk, remaining))
        remaining -= cfg.chunk
    workers = worker_count()
    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(
                lambda iv: _chunk_counts(cp, cfg, iv[0], iv[1], r_sq),
                enumerate(sizes)))
    else:
        counts = [_chunk_counts(cp, cfg, i, s, r_sq) for i, s in enumerate(sizes)]
    false_alarms = sum(c[0] for c in counts)
    missed = sum(c[1] for c in counts)
    m = float(cfg.samples)
    alpha_hat = false_alarms / m
    beta_hat = missed / m
    std_err = math.sqrt(alpha_hat * (1.0 - alpha_hat) / m
                        + beta_hat * (1.0 - beta_hat) / m)
    return McEstimate(tvd_hat=1.0 - alpha_hat - beta_hat, std_err=std_err,
                      alpha_hat=alpha_hat, beta_hat=beta_hat)


def quad_tvd(cp: ChannelPoint, tol: float = 1e-10) -> float:
    """Adaptive quadrature of the density difference over [0, R^2].

    The integrand x^(n/2-1) [sigma^-n e^(-x/(2 sigma^2)) - sigma1^-n
    e^(-x/(2 sigma1^2))] / (2^(n/2) Gamma(n/2)) is positive on the
    acceptance region (the densities cross exactly at R^2) and is evaluated
    through its two log-densities; the subdivision points are seeded at the
    two density modes.  Certifies |quad_tvd - tvd_exact| <= max(tol, 1e-10).
    """
    if not (isinstance(tol, (int, float)) and tol > 0):
        raise DomainError(f"tol must be > 0, got {tol!r}")
    if cp.theta == 0:
        return 0.0
    t = thresholds(cp)
    n = cp.n
    s2 = cp.sigma_sq
    s12 = cp.sigma_sq * (1.0 + cp.theta)
    half = 0.5 * n
    lg = math.lgamma(half)
    c0 = half * math.log(2.0 * s2) + lg
    c1 = half * math.log(2.0 * s12) + lg

    def integrand(x: float) -> float:
        if x <= 0.0:
            return 0.0
        lx = math.log(x)
        la = -x / (2.0 * s2) + (half - 1.0) * lx - c0
        lb = -x / (2.0 * s12) + (half - 1.0) * lx - c1
        if la < -745.0 and lb < -745.0:
            return 0.0
        # la >= lb on [0, R^2]; factoring keeps the difference accurate
        return math.exp(la) * -math.expm1(lb - la)

    mode0 = 2.0 * s2 * (half - 1.0)
    mode1 = 2.0 * s12 * (half - 1.0)
    pts = sorted({m for m in (mode0, mode1) if 0.0 < m < t.r_sq})
    eps = max(tol, 1e-10) / 10.0
    value, abserr, info = quad(integrand, 0.0, t.r_sq, points=pts or None,
                               limit=300, epsabs=eps, epsrel=eps,
                               full_output=True)[:3]
    if abserr > max(tol, 1e-10):
        raise QuadratureError(
            f"quadrature error estimate {abserr!r} exceeds tolerance at "
            f"n={n}, theta={cp.theta!r}",
            subdivisions=int(info.get("last", 0)),
        )
    return value
