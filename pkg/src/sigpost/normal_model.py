"""Conjugate Normal model: posteriors conditional on a significance verdict.

Setting: a parameter theta carries a Normal prior N(mu, sigma^2); the data
are n independent N(theta, 1) measurements summarized by their mean
theta_hat ~ N(theta, 1/n); the test reports "significant" when
sqrt(n) |theta_hat| > c. The observer learns only the verdict (optionally
refined by the sign of theta_hat) and updates the prior on that event
alone.

Every event of interest is a union of at most two intervals for the
t-ratio T = sqrt(n) * theta_hat:

    significant              |T| > c
    non-significant          |T| <= c
    significant, positive     T > c
    non-significant, positive 0 < T <= c
    significant, negative     T < -c
    non-significant, negative -c <= T <= 0

Given theta, T ~ N(sqrt(n) theta, 1); under the prior predictive,
T ~ N(sqrt(n) mu, 1 + n sigma^2). Both the per-theta event likelihood and
the marginal event probability are therefore instances of one primitive,
the Gaussian interval probability, evaluated in log space so that tail
products such as phi(-10) * Phi(-40) never underflow. In particular the
marginal probability of significance is

    Pr(|T| > c) = Phi((sqrt(n) mu - c) / sqrt(1 + n sigma^2))
                + Phi((-sqrt(n) mu - c) / sqrt(1 + n sigma^2)),

and each conditional posterior density is

    prior density * event likelihood / event probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np

from . import numerics
from .errors import DegenerateConditioningError, DomainError
from .numerics import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    log_gaussian_interval_prob,
    std_normal_cdf,
)

__all__ = [
    "ConditionalPosterior",
    "FullInfoPosterior",
    "NormalPrior",
    "PointNullDesign",
    "SIGN_PARTITION",
    "SignificanceEvent",
    "TWO_SIDED_PARTITION",
    "full_information_posterior",
    "log_event_likelihood",
    "log_event_probability",
    "marginal_rejection_probability",
    "marginal_rejection_probability_by_quadrature",
    "posterior_given_event",
    "rejection_probability_given_theta",
    "sign_ratio_limit_nonsignificant",
    "sign_ratio_limit_significant",
]

# Conditioning events with probability below this are refused outright.
MIN_EVENT_PROBABILITY = 1e-300
_LOG_MIN_EVENT_PROBABILITY = math.log(MIN_EVENT_PROBABILITY)


class SignificanceEvent(Enum):
    """Observable outcomes of the test, coarse (two-way) or sign-refined."""

    SIGNIFICANT = "significant"
    NON_SIGNIFICANT = "nonsignificant"
    SIGNIFICANT_POSITIVE = "significant-positive"
    NON_SIGNIFICANT_POSITIVE = "nonsignificant-positive"
    SIGNIFICANT_NEGATIVE = "significant-negative"
    NON_SIGNIFICANT_NEGATIVE = "nonsignificant-negative"


TWO_SIDED_PARTITION = (
    SignificanceEvent.SIGNIFICANT,
    SignificanceEvent.NON_SIGNIFICANT,
)

SIGN_PARTITION = (
    SignificanceEvent.SIGNIFICANT_POSITIVE,
    SignificanceEvent.NON_SIGNIFICANT_POSITIVE,
    SignificanceEvent.SIGNIFICANT_NEGATIVE,
    SignificanceEvent.NON_SIGNIFICANT_NEGATIVE,
)


@dataclass(frozen=True)
class NormalPrior:
    """Normal belief N(mu, sigma^2) over theta, sigma > 0."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma)):
            raise DomainError("prior parameters must be finite")
        if not self.sigma > 0.0:
            raise DomainError(f"prior sigma must be positive, got {self.sigma!r}")

    def pdf(self, theta):
        return np.exp(self.log_pdf(theta))

    def log_pdf(self, theta):
        z = (np.asarray(theta, dtype=float) - self.mu) / self.sigma
        out = -0.5 * z * z - math.log(self.sigma) - 0.5 * math.log(2.0 * math.pi)
        return float(out) if np.ndim(theta) == 0 else out


@dataclass(frozen=True)
class PointNullDesign:
    """A two-sided test of theta = 0: reject when sqrt(n)|theta_hat| > c.

    The measurement variance is fixed at one; rescale units for any other
    value. c = 0 is admitted as the degenerate always-rejecting test (it
    appears as a boundary case in oracle checks); posterior construction
    then refuses the probability-zero non-significance events.
    """

    n: int
    c: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise DomainError(f"n must be an integer, got {self.n!r}")
        if self.n < 1:
            raise DomainError(f"n must be >= 1, got {self.n!r}")
        if not (math.isfinite(self.c) and self.c >= 0.0):
            raise DomainError(f"c must be finite and >= 0, got {self.c!r}")

    @property
    def sqrt_n(self) -> float:
        return math.sqrt(self.n)


@dataclass(frozen=True)
class FullInfoPosterior:
    """Posterior after seeing the entire sample: N(mu_n, sigma_n^2)."""

    mu_n: float
    sigma_n: float


@dataclass(frozen=True)
class ConditionalPosterior:
    """An evaluable posterior density together with its conditioning event.

    ``density`` and ``log_density`` accept a float or an ndarray of theta
    values. ``support_hint`` bounds the region carrying all but a
    negligible sliver of mass (useful for plotting and quadrature), and
    ``quad_splits`` lists interior points where the density has sharp
    transitions so quadrature can anchor panels there.
    """

    event_probability: float
    density: Callable
    log_density: Callable
    support_hint: tuple[float, float]
    quad_splits: tuple[float, ...] = field(default=())

    def mass(
        self,
        lo: float | None = None,
        hi: float | None = None,
        spec: QuadratureSpec = DEFAULT_QUADRATURE,
    ) -> float:
        """Posterior probability of (lo, hi); defaults to the support hint."""
        if lo is None:
            lo = self.support_hint[0]
        if hi is None:
            hi = self.support_hint[1]
        return numerics.integrate_with_splits(
            self.density, (float(lo), float(hi)), self.quad_splits, spec
        )


def _event_intervals(
    event: SignificanceEvent, c: float
) -> tuple[tuple[float, float], ...]:
    """The event as intervals for the t-ratio sqrt(n) * theta_hat."""
    inf = math.inf
    if event is SignificanceEvent.SIGNIFICANT:
        return ((-inf, -c), (c, inf))
    if event is SignificanceEvent.NON_SIGNIFICANT:
        return ((-c, c),)
    if event is SignificanceEvent.SIGNIFICANT_POSITIVE:
        return ((c, inf),)
    if event is SignificanceEvent.NON_SIGNIFICANT_POSITIVE:
        return ((0.0, c),)
    if event is SignificanceEvent.SIGNIFICANT_NEGATIVE:
        return ((-inf, -c),)
    if event is SignificanceEvent.NON_SIGNIFICANT_NEGATIVE:
        return ((-c, 0.0),)
    raise DomainError(f"unknown event {event!r}")


def _log_event_prob_for_tstat(event: SignificanceEvent, c: float, mean, sd: float):
    """log Pr(event) when the t-ratio is N(mean, sd^2); mean may be an array."""
    pieces = [
        log_gaussian_interval_prob(mean, sd, lo, hi)
        for lo, hi in _event_intervals(event, c)
    ]
    if len(pieces) == 1:
        return pieces[0]
    return np.logaddexp(pieces[0], pieces[1])


def log_event_likelihood(event: SignificanceEvent, design: PointNullDesign, theta):
    """log Pr(event | theta): the t-ratio is N(sqrt(n) theta, 1).

    Accepts a scalar or an ndarray of theta values. For the two-sided
    events this is the familiar

        log( Phi(sqrt(n) theta - c) + Phi(-sqrt(n) theta - c) )

    and its complement; the sign-refined events take one tail or one
    finite slice.
    """
    theta_arr = np.asarray(theta, dtype=float)
    if not np.all(np.isfinite(theta_arr)):
        raise DomainError("theta must be finite")
    out = _log_event_prob_for_tstat(event, design.c, design.sqrt_n * theta_arr, 1.0)
    return float(out) if np.ndim(theta) == 0 else out


def log_event_probability(
    event: SignificanceEvent, prior: NormalPrior, design: PointNullDesign
) -> float:
    """log Pr(event) under the prior predictive.

    Integrating the per-theta likelihood against the prior collapses to a
    single Gaussian interval probability because the t-ratio is marginally
    N(sqrt(n) mu, 1 + n sigma^2); this is the closed form behind the
    rejection-probability formula and is cross-checked against explicit
    quadrature by :func:`marginal_rejection_probability_by_quadrature`.
    """
    mean = design.sqrt_n * prior.mu
    sd = math.sqrt(1.0 + design.n * prior.sigma**2)
    return float(_log_event_prob_for_tstat(event, design.c, mean, sd))


def rejection_probability_given_theta(theta: float, design: PointNullDesign) -> float:
    """Pr(sqrt(n)|theta_hat| > c | theta) = Phi(sqrt(n)theta - c) + Phi(-sqrt(n)theta - c).

    Even in theta and minimized at theta = 0, where it equals the size
    2 Phi(-c).
    """
    return math.exp(
        log_event_likelihood(SignificanceEvent.SIGNIFICANT, design, float(theta))
    )


def marginal_rejection_probability(prior: NormalPrior, design: PointNullDesign) -> float:
    """Pr(sqrt(n)|theta_hat| > c) under the prior predictive, in closed form."""
    return math.exp(
        log_event_probability(SignificanceEvent.SIGNIFICANT, prior, design)
    )


def _transition_splits(design: PointNullDesign) -> tuple[float, ...]:
    """Interior theta values where event likelihoods switch regimes."""
    s = design.sqrt_n
    return tuple(sorted({-design.c / s, 0.0, design.c / s}))


def _prior_window(prior: NormalPrior, design: PointNullDesign, k: float) -> tuple[float, float]:
    lo = min(prior.mu - k * prior.sigma, -(design.c + 6.0) / design.sqrt_n)
    hi = max(prior.mu + k * prior.sigma, (design.c + 6.0) / design.sqrt_n)
    return lo, hi


def marginal_rejection_probability_by_quadrature(
    prior: NormalPrior,
    design: PointNullDesign,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """The same marginal rejection probability via explicit quadrature.

    Integrates rejection_probability_given_theta against the prior density
    over a +-tail_halfwidth_sigmas window, splitting panels at the
    likelihood transition points +-c/sqrt(n). Serves as the independent
    route in tests of the closed form above.
    """
    window = _prior_window(prior, design, spec.tail_halfwidth_sigmas)

    def integrand(theta: float) -> float:
        return rejection_probability_given_theta(theta, design) * float(
            prior.pdf(theta)
        )

    return numerics.integrate_with_splits(
        integrand, window, _transition_splits(design), spec
    )


def posterior_given_event(
    prior: NormalPrior, design: PointNullDesign, event: SignificanceEvent
) -> ConditionalPosterior:
    """Exact finite-n posterior of theta given only the test outcome.

    density(theta) = prior pdf * Pr(event | theta) / Pr(event), assembled
    in log space. Raises :class:`DegenerateConditioningError` when the
    event probability falls below 1e-300 (for instance non-significance
    under a c = 0 design).
    """
    log_p = log_event_probability(event, prior, design)
    if not log_p >= _LOG_MIN_EVENT_PROBABILITY:
        raise DegenerateConditioningError(
            f"event {event.value} has log-probability {log_p!r}"
        )

    def log_density(theta):
        theta_arr = np.asarray(theta, dtype=float)
        out = (
            prior.log_pdf(theta_arr)
            + log_event_likelihood(event, design, theta_arr)
            - log_p
        )
        return float(out) if np.ndim(theta) == 0 else out

    def density(theta):
        out = np.exp(log_density(theta))
        return float(out) if np.ndim(theta) == 0 else out

    return ConditionalPosterior(
        event_probability=math.exp(log_p),
        density=density,
        log_density=log_density,
        support_hint=_prior_window(prior, design, 10.0),
        quad_splits=_transition_splits(design),
    )


def full_information_posterior(
    prior: NormalPrior, n: int, theta_hat: float
) -> FullInfoPosterior:
    """Posterior after observing the whole sample (equivalently the t-ratio):

        mu_n    = (mu + n sigma^2 theta_hat) / (1 + n sigma^2)
        sigma_n = sigma / sqrt(1 + n sigma^2)
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    theta_hat = float(theta_hat)
    if not math.isfinite(theta_hat):
        raise DomainError("theta_hat must be finite")
    shrink = 1.0 + n * prior.sigma**2
    return FullInfoPosterior(
        mu_n=(prior.mu + n * prior.sigma**2 * theta_hat) / shrink,
        sigma_n=prior.sigma / math.sqrt(shrink),
    )


def sign_ratio_limit_significant(prior: NormalPrior, c: float, theta: float) -> float:
    """Large-n limit of posterior/prior density after significance with a
    positive estimate:

        0                      theta < 0
        Phi(-c) / Phi(mu/sigma)  theta = 0
        1 / Phi(mu/sigma)        theta > 0

    The theta > 0 branch equals 2 when mu = 0: conditioning on a positive
    significant estimate can at most double the density of already-likely
    positive values whenever mu is non-negative.
    """
    if not (math.isfinite(c) and c > 0.0):
        raise DomainError(f"c must be positive and finite, got {c!r}")
    theta = float(theta)
    if math.isnan(theta):
        raise DomainError("theta must not be NaN")
    prob_positive = std_normal_cdf(prior.mu / prior.sigma)
    if theta < 0.0:
        return 0.0
    if theta == 0.0:
        return std_normal_cdf(-c) / prob_positive
    return 1.0 / prob_positive


def sign_ratio_limit_nonsignificant(theta: float) -> float:
    """Large-n limit of posterior/prior density after a positive but
    non-significant estimate: 0 for theta != 0, +inf at theta = 0.

    The infinity is an explicit sentinel (math.inf), never an overflow
    artifact.
    """
    theta = float(theta)
    if math.isnan(theta):
        raise DomainError("theta must not be NaN")
    return math.inf if theta == 0.0 else 0.0
