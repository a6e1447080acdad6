"""Exception hierarchy shared across the package."""


class SigpostError(Exception):
    """Base class for every error raised by this package."""


class DomainError(SigpostError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class BracketError(SigpostError, ValueError):
    """A root-finding bracket does not enclose a sign change."""


class QuadratureError(SigpostError, RuntimeError):
    """Adaptive quadrature exhausted its subdivision budget before reaching
    tolerance.

    Carries the best available estimate and a bound on its error so callers
    can decide whether the partial result is still usable.
    """

    def __init__(self, message: str, best_estimate: float, error_bound: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_bound = error_bound


class DegenerateConditioningError(SigpostError, ArithmeticError):
    """The conditioning event has vanishing probability under the prior
    predictive (below 1e-300), so no posterior can be formed."""


class InsufficientConditioningError(SigpostError, RuntimeError):
    """Too few simulated draws landed in the conditioning event to build a
    meaningful conditional histogram."""
