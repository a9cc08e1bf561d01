# cython: language_level=3, boundscheck=False, cdivision=True
"""Compiled twin of the regularized incomplete gamma kernel.

Same algorithm and constants as ``_kernels_py``; the pure-Python module is
the reference, this one is the fast path picked by ``covertfbl.backend``
when built.
"""

from libc.math cimport exp, fabs, lgamma, log

BACKEND_NAME = "cython"

MAX_ITER = 10_000

cdef double _STEP_TOL = 1e-15
cdef double _TINY = 1e-300
cdef int _MAX_ITER_C = 10_000


def reg_gamma_pq(double a, double z):
    """Return (P(a, z), Q(a, z), iterations); see the pure twin for details."""
    cdef double ln_pref, term, total, p, q
    cdef double b, c, d, h, an, delta
    cdef int k

    if z == 0.0:
        return 0.0, 1.0, 0
    ln_pref = a * log(z) - z - lgamma(a)
    if z < a + 1.0:
        term = 1.0 / a
        total = term
        k = 0
        while k < _MAX_ITER_C:
            k += 1
            term *= z / (a + k)
            total += term
            if term < _STEP_TOL * total:
                break
        p = total * exp(ln_pref)
        if p > 1.0:
            p = 1.0
        return p, 1.0 - p, k

    b = z + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    k = 0
    while k < _MAX_ITER_C:
        k += 1
        an = -k * (k - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if fabs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _STEP_TOL:
            break
    q = h * exp(ln_pref)
    if q > 1.0:
        q = 1.0
    return 1.0 - q, q, k
