"""Benchmark: compiled vs pure-Python incomplete-gamma kernel.

The kernel dominates every exact-TVD sweep, so this compares the two twins
on the workloads the package actually runs: a bound-sandwich style grid and
transition-zone evaluations at large shape (the slowest case, O(sqrt(a))
iterations per call).

Usage:  python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import math
import time

from covertfbl import _kernels_py

try:
    from covertfbl import _kernels_cy
except ImportError:
    _kernels_cy = None


def grid_workload(kernel) -> int:
    """Exact-TVD kernel calls over an n x theta grid (sandwich-style)."""
    count = 0
    for i in range(40):
        n = int(round(math.exp(math.log(2) + i * (math.log(50_000) - math.log(2)) / 39)))
        half = 0.5 * n
        for j in range(40):
            th = math.exp(math.log(1e-4) + j * (math.log(10.0) - math.log(1e-4)) / 39)
            g = half * math.log1p(th) / th
            kernel(half, g * (1.0 + th))
            kernel(half, g)
            count += 2
    return count


def transition_workload(kernel) -> int:
    """Worst-case calls: z within a few sigma of a large shape."""
    count = 0
    for a in (1e4, 1e5, 5e5):
        for pull in (-2.0, -0.5, 0.5, 2.0):
            for _ in range(8):
                kernel(a, a + pull * math.sqrt(a))
                count += 1
    return count


def timed(fn, kernel) -> tuple[float, int]:
    start = time.perf_counter()
    calls = fn(kernel)
    return time.perf_counter() - start, calls


def main() -> None:
    workloads = [("bound-sandwich grid", grid_workload),
                 ("transition zone, large a", transition_workload)]
    print(f"{'workload':28s} {'backend':8s} {'calls':>6s} {'time':>9s} {'us/call':>9s}")
    for name, fn in workloads:
        t_py, calls = timed(fn, _kernels_py.reg_gamma_pq)
        print(f"{name:28s} {'python':8s} {calls:6d} {t_py:8.3f}s {1e6 * t_py / calls:9.2f}")
        if _kernels_cy is not None:
            t_cy, calls = timed(fn, _kernels_cy.reg_gamma_pq)
            print(f"{name:28s} {'cython':8s} {calls:6d} {t_cy:8.3f}s "
                  f"{1e6 * t_cy / calls:9.2f}   (speedup {t_py / t_cy:5.1f}x)")
        else:
            print(f"{name:28s} {'cython':8s}    not built")


if __name__ == "__main__":
    main()
