"""Exception types shared across the package.

Numerical failures are always explicit exceptions, never silent NaNs; the CLI
maps them to exit code 2 (usage/domain problems map to exit code 1).
"""

from __future__ import annotations


class DomainError(ValueError):
    """An argument is outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """An iterative kernel exhausted its iteration budget."""

    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


class BracketError(RuntimeError):
    """A root finder could not bracket the target value."""

    def __init__(self, message: str, lo: float, hi: float):
        super().__init__(f"{message} (last bracket tried: [{lo!r}, {hi!r}])")
        self.lo = lo
        self.hi = hi


class ToleranceNotReached(RuntimeError):
    """A root finder stopped before meeting the requested tolerance."""

    def __init__(self, message: str, best: float, residual: float):
        super().__init__(f"{message} (best iterate {best!r}, residual {residual!r})")
        self.best = best
        self.residual = residual


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to converge."""

    def __init__(self, message: str, subdivisions: int):
        super().__init__(f"{message} ({subdivisions} subdivisions used)")
        self.subdivisions = subdivisions


class PhiInstabilityError(RuntimeError):
    """The two evaluation paths for the tail auxiliary functions disagree."""


class SeriesDivergenceError(RuntimeError):
    """An asymptotic series is diverging from its first term onward."""


class GridError(ValueError):
    """A sweep/fit grid is degenerate or left too few usable points."""
