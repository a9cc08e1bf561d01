"""Pure-Python regularized incomplete gamma kernel.

This is the hot inner loop of the whole package: every exact TVD evaluation
costs two calls to :func:`reg_gamma_pq`.  A compiled twin with identical
algorithm and constants lives in ``_kernels_cy.pyx``; either one can back
``covertfbl.specfun`` (see ``covertfbl.backend``).

Evaluation strategy: lower series for z < a + 1, modified-Lentz continued
fraction otherwise, with the e^{-z} z^a / Gamma(a) prefactor assembled in log
space so that shapes up to a ~ 1e7 never overflow.  Near the transition point
z ~ a both methods need O(sqrt(a)) iterations, hence the large iteration
budget.
"""

from __future__ import annotations

import math

BACKEND_NAME = "python"

MAX_ITER = 10_000
STEP_TOL = 1e-15
_TINY = 1e-300


def reg_gamma_pq(a: float, z: float) -> tuple[float, float, int]:
    """Return (P(a, z), Q(a, z), iterations) for a > 0, z >= 0.

    P is the regularized lower incomplete gamma function, Q = 1 - P the
    upper one; the pair always sums to 1 exactly because only one of the
    two is computed and the other is its complement.  An iteration count
    equal to MAX_ITER signals non-convergence; callers turn that into an
    explicit error.  Arguments are assumed pre-validated.
    """
    if z == 0.0:
        return 0.0, 1.0, 0
    ln_pref = a * math.log(z) - z - math.lgamma(a)
    if z < a + 1.0:
        # gamma(a, z) = e^{-z} z^a * sum_k z^k / (a (a+1) ... (a+k))
        term = 1.0 / a
        total = term
        k = 0
        while k < MAX_ITER:
            k += 1
            term *= z / (a + k)
            total += term
            if term < STEP_TOL * total:
                break
        p = total * math.exp(ln_pref)
        if p > 1.0:
            p = 1.0
        return p, 1.0 - p, k

    # Q(a, z) continued fraction, modified Lentz
    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    k = 0
    while k < MAX_ITER:
        k += 1
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < STEP_TOL:
            break
    q = h * math.exp(ln_pref)
    if q > 1.0:
        q = 1.0
    return 1.0 - q, q, k
