"""Testing the interval null theta in [-delta, delta] in the Normal model.

Size is controlled at the boundary of the null, where the rejection
probability is largest, so the critical value solves

    Phi(sqrt(n) delta - c) + Phi(-sqrt(n) delta - c) = alpha.

There is no closed form, but the left side is strictly decreasing in c and
the root is pinned between sqrt(n) delta (where the size is about one
half) and sqrt(n) delta + 10 (where it is below 7.7e-24), so bisection
with secant acceleration on that bracket is safe for any alpha < 1/2. For
large sqrt(n) delta the second term is negligible and

    c ~ Phi^{-1}(1 - alpha) + sqrt(n) delta

is accurate to under 1e-6 already at sqrt(n) delta >= 5. The critical
value growing at a root-n rate makes the rejection probability converge to
one outside [-delta, delta] and to zero inside, so the large-n posteriors
are the prior truncated to the complement of (-delta, delta) after
significance and to (-delta, delta) after non-significance. All size
evaluations go through the log-cdf: at sqrt(n) delta = 100 the off-tail
term is far below the smallest positive double.

Only the Normal-Normal model is supported here; general priors and
statistics live in general_model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .normal_model import (
    ConditionalPosterior,
    NormalPrior,
    PointNullDesign,
    SignificanceEvent,
    log_event_likelihood,
    posterior_given_event,
)
from .numerics import Bracket, find_root, std_normal_quantile

__all__ = [
    "IntervalNullDesign",
    "approximate_critical_value",
    "interval_posterior",
    "interval_rejection_log_probability",
    "interval_rejection_probability",
    "solve_critical_value",
    "solve_design",
]

_SIZE_RESIDUAL_TOL = 1e-10


def _validate_inputs(n: int, delta: float, alpha: float) -> tuple[int, float, float]:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    delta = float(delta)
    if not (math.isfinite(delta) and delta > 0.0):
        raise DomainError(f"delta must be positive and finite, got {delta!r}")
    alpha = float(alpha)
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return int(n), delta, alpha


def _log_size(snd: float, c: float) -> float:
    """log of Phi(snd - c) + Phi(-snd - c), the size at |theta| = delta."""
    from .numerics import std_normal_log_cdf

    return float(np.logaddexp(std_normal_log_cdf(snd - c), std_normal_log_cdf(-snd - c)))


def solve_critical_value(n: int, delta: float, alpha: float) -> float:
    """Critical value making the test of theta in [-delta, delta] size alpha.

    Solves the size equation on the log scale (well conditioned even when
    the off-tail term underflows). For alpha < 1/2 the bracket
    [sqrt(n) delta, sqrt(n) delta + 10] always contains the root; larger
    alphas move the root below sqrt(n) delta and the bracket is widened
    down toward zero accordingly.
    """
    n, delta, alpha = _validate_inputs(n, delta, alpha)
    snd = math.sqrt(n) * delta
    log_alpha = math.log(alpha)

    def gap(c: float) -> float:
        return _log_size(snd, c) - log_alpha

    if _log_size(snd, snd) >= log_alpha:
        bracket = Bracket(snd, snd + 10.0)
    else:
        bracket = Bracket(snd * 1e-12, snd)
    return find_root(gap, bracket, tol=1e-13)


def approximate_critical_value(n: int, delta: float, alpha: float) -> float:
    """Large sqrt(n) delta approximation Phi^{-1}(1 - alpha) + sqrt(n) delta."""
    n, delta, alpha = _validate_inputs(n, delta, alpha)
    return std_normal_quantile(1.0 - alpha) + math.sqrt(n) * delta


@dataclass(frozen=True)
class IntervalNullDesign:
    """A solved interval-null test: reject when sqrt(n)|theta_hat| > c.

    Construction validates that c actually solves the size equation to
    1e-10 (build one with :func:`solve_design` rather than guessing c).
    """

    n: int
    delta: float
    alpha: float
    c: float

    def __post_init__(self) -> None:
        n, delta, alpha = _validate_inputs(self.n, self.delta, self.alpha)
        if not (math.isfinite(self.c) and self.c > 0.0):
            raise DomainError(f"c must be positive and finite, got {self.c!r}")
        snd = math.sqrt(n) * delta
        residual = abs(math.exp(_log_size(snd, self.c)) - alpha)
        if residual > _SIZE_RESIDUAL_TOL:
            raise DomainError(
                f"c={self.c!r} misses the size equation by {residual!r}"
            )
        if alpha < 0.5 and not self.c > snd:
            raise DomainError("c must exceed sqrt(n) delta when alpha < 1/2")

    @property
    def sqrt_n_delta(self) -> float:
        return math.sqrt(self.n) * self.delta


def solve_design(n: int, delta: float, alpha: float) -> IntervalNullDesign:
    """Solve for c and package the full design."""
    return IntervalNullDesign(
        n=int(n), delta=float(delta), alpha=float(alpha),
        c=solve_critical_value(n, delta, alpha),
    )


def interval_rejection_probability(theta: float, design: IntervalNullDesign) -> float:
    """Pr(sqrt(n)|theta_hat| > c | theta) with the solved critical value.

    Equals alpha at |theta| = delta by construction; tends to one outside
    [-delta, delta] and to zero inside as n grows. May underflow to 0.0
    deep inside the null at large n; the log variant below stays finite.
    """
    return math.exp(interval_rejection_log_probability(theta, design))


def interval_rejection_log_probability(
    theta: float, design: IntervalNullDesign
) -> float:
    """log of the rejection probability, meaningful at any magnitude.

    At n = 10^4, delta = 0.5, alpha = 0.05 the rejection probability at
    theta = 0 is around exp(-1336); this accessor reports that exponent
    rather than a flushed zero.
    """
    point = PointNullDesign(n=design.n, c=design.c)
    return log_event_likelihood(SignificanceEvent.SIGNIFICANT, point, float(theta))


def interval_posterior(
    prior: NormalPrior, design: IntervalNullDesign, significant: bool
) -> ConditionalPosterior:
    """Finite-n posterior given the interval-null verdict.

    The event likelihood has the same functional form as the point-null
    one with the solved c, so this delegates to the Normal-model update.
    At large n the result approaches the prior truncated to the complement
    of (-delta, delta) after significance and to (-delta, delta) after
    non-significance, with an O(1/sqrt(n)) boundary layer at +-delta (the
    effective truncation point sits at c/sqrt(n) = delta +
    Phi^{-1}(1-alpha)/sqrt(n), not at delta itself).
    """
    event = (
        SignificanceEvent.SIGNIFICANT if significant else SignificanceEvent.NON_SIGNIFICANT
    )
    point = PointNullDesign(n=design.n, c=design.c)
    return posterior_given_event(prior, point, event)
