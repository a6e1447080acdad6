"""Posteriors under general priors and general test statistics.

The test statistic is represented only through what the asymptotics
depend on: its size alpha and its Type II error curve
beta_n(theta) = Pr(T_n <= c | theta). A curve must be consistent
(beta_n(theta) -> 0 for theta != 0) and have asymptotic size alpha
(1 - beta_n(0) -> alpha); both hold for the built-in Normal instantiation

    beta_n(theta) = Phi(c - sqrt(n) theta) - Phi(-c - sqrt(n) theta),
    alpha = 2 Phi(-c).

The prior may put a point mass q at zero next to a continuous component.
The finite-n Bayes updates are exact mixture arithmetic: the atom is
reweighted by the event likelihood at zero and never smoothed into a
density, since the large-n behaviour of the posterior mass at zero is the
object of interest. Against these finite-n updates the module exposes the
limit formulas they converge to: after significance the posterior/prior
density ratio at theta != 0 tends to 1 / (q alpha + (1 - q)), the mass at
zero to q alpha / (q alpha + (1 - q)); after non-significance the mass at
zero tends to one. Significance at least doubles the density at nonzero
theta only when q >= 1 / (2 (1 - alpha)), which exceeds one half for any
size.

User-supplied densities and power curves must be reentrant: they are
called concurrently from quadrature and simulation code.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
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
    "MixedPosterior",
    "MixedPrior",
    "TestPowerCurve",
    "decay_rate_estimate",
    "doubling_threshold",
    "local_power_mass",
    "marginal_significance_probability",
    "normal_mixed_prior",
    "normal_power_curve",
    "posterior_given_nonsignificance",
    "posterior_given_significance",
    "significance_ratio_limit",
]

_LOG_MIN_EVENT_PROBABILITY = math.log(1e-300)


@dataclass(frozen=True)
class MixedPrior:
    """Point mass q at zero plus a continuous component.

    ``continuous_density`` must be positive and continuous at zero,
    integrate to one over ``continuous_support`` (checked at construction
    to 1e-6), and accept scalar floats; vectorized evaluation is used
    opportunistically where available. q = 0 recovers a purely continuous
    prior.
    """

    q: float
    continuous_density: Callable
    continuous_support: tuple[float, float]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.q) and 0.0 <= self.q < 1.0):
            raise DomainError(f"q must lie in [0, 1), got {self.q!r}")
        lo, hi = self.continuous_support
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise DomainError("continuous_support must be a finite interval")
        if not lo < 0.0 < hi:
            raise DomainError("continuous_support must contain zero")
        at_zero = float(self.continuous_density(0.0))
        if not at_zero > 0.0:
            raise DomainError("continuous_density must be positive at zero")
        total = numerics.integrate_with_splits(
            lambda t: float(self.continuous_density(t)),
            (lo, hi),
            (0.0,),
            DEFAULT_QUADRATURE,
        )
        if abs(total - 1.0) > 1e-6:
            raise DomainError(
                f"continuous_density integrates to {total!r} over the support, "
                "expected 1 within 1e-6"
            )


def normal_mixed_prior(q: float, mu: float = 0.0, sigma: float = 1.0) -> MixedPrior:
    """MixedPrior whose continuous component is N(mu, sigma^2)."""
    if not (math.isfinite(mu) and math.isfinite(sigma) and sigma > 0.0):
        raise DomainError("mu must be finite and sigma positive")
    inv = 1.0 / (sigma * math.sqrt(2.0 * math.pi))

    def density(theta):
        z = (np.asarray(theta, dtype=float) - mu) / sigma
        out = inv * np.exp(-0.5 * z * z)
        return float(out) if np.ndim(theta) == 0 else out

    return MixedPrior(
        q=q,
        continuous_density=density,
        continuous_support=(mu - 12.0 * sigma, mu + 12.0 * sigma),
    )


@dataclass(frozen=True)
class TestPowerCurve:
    """A test statistic reduced to its size and Type II error curve.

    ``type2_at(theta, n)`` returns beta_n(theta) = Pr(T_n <= c | theta).
    ``log_type2_at`` is optional but required in practice for decay-rate
    work: beta_n underflows double precision quickly at fixed alternatives
    (for the Normal curve already near n ~ 700 at theta = 1).

    Assumed of every curve, as of the built-in one: consistency under
    fixed alternatives, asymptotic size alpha, and imperfect local
    asymptotic power; the last is not verifiable at construction (it
    involves an n -> infinity integral) but :func:`local_power_mass` flags
    curves that visibly violate it.
    """

    alpha: float
    type2_at: Callable
    log_type2_at: Callable | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.alpha) and 0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha!r}")

    def beta(self, theta, n: int):
        return self.type2_at(theta, n)

    def log_beta(self, theta, n: int):
        if self.log_type2_at is not None:
            return self.log_type2_at(theta, n)
        with np.errstate(divide="ignore"):
            out = np.log(np.asarray(self.type2_at(theta, n), dtype=float))
        return float(out) if np.ndim(theta) == 0 else out


def normal_power_curve(c: float) -> TestPowerCurve:
    """The Normal-model statistic sqrt(n)|theta_hat| as a power curve."""
    if not (math.isfinite(c) and c > 0.0):
        raise DomainError(f"c must be positive and finite, got {c!r}")

    def log_type2(theta, n):
        mean = math.sqrt(n) * np.asarray(theta, dtype=float)
        out = log_gaussian_interval_prob(mean, 1.0, -c, c)
        return float(out) if np.ndim(theta) == 0 else out

    def type2(theta, n):
        out = np.exp(log_type2(theta, n))
        return float(out) if np.ndim(theta) == 0 else out

    return TestPowerCurve(
        alpha=2.0 * std_normal_cdf(-c), type2_at=type2, log_type2_at=log_type2
    )


@dataclass(frozen=True)
class MixedPosterior:
    """Posterior for a MixedPrior: updated atom plus continuous part.

    ``mass_at_zero`` plus the integral of ``continuous_density`` over the
    support is one (up to quadrature tolerance); ``event_probability`` is
    the prior-predictive probability of the conditioning event.
    """

    mass_at_zero: float
    continuous_density: Callable
    event_probability: float
    support: tuple[float, float]
    quad_splits: tuple[float, ...] = field(default=())

    def continuous_mass(
        self,
        lo: float | None = None,
        hi: float | None = None,
        spec: QuadratureSpec = DEFAULT_QUADRATURE,
    ) -> float:
        """Integral of the continuous part over (lo, hi); defaults to the support."""
        if lo is None:
            lo = self.support[0]
        if hi is None:
            hi = self.support[1]
        return numerics.integrate_with_splits(
            lambda t: float(self.continuous_density(t)),
            (float(lo), float(hi)),
            self.quad_splits,
            spec,
        )


def _power_splits(n: int, support: tuple[float, float]) -> tuple[float, ...]:
    """Panel anchors around the 1/sqrt(n)-scale features of beta_n."""
    root_n = math.sqrt(n)
    pts = {0.0}
    for k in (1.0, 4.0, 16.0, 64.0, 256.0):
        pts.add(k / root_n)
        pts.add(-k / root_n)
    lo, hi = support
    return tuple(sorted(p for p in pts if lo < p < hi))


def _require_n(n: int) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise DomainError(f"n must be an integer >= 1, got {n!r}")
    return int(n)


def _type2_prior_integral(
    prior: MixedPrior, curve: TestPowerCurve, n: int, spec: QuadratureSpec
) -> float:
    """Integral of beta_n against the continuous prior component."""

    def integrand(theta: float) -> float:
        return float(curve.type2_at(theta, n)) * float(
            prior.continuous_density(theta)
        )

    return numerics.integrate_with_splits(
        integrand,
        prior.continuous_support,
        _power_splits(n, prior.continuous_support),
        spec,
    )


def marginal_significance_probability(
    prior: MixedPrior,
    curve: TestPowerCurve,
    n: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Pr(T_n > c) under the prior predictive at finite n.

    q (1 - beta_n(0)) + (1 - q) * integral of (1 - beta_n) against the
    continuous component. Converges to q alpha + (1 - q) as n grows (to
    one in the purely continuous case q = 0) at a 1/sqrt(n) rate set by
    the prior density at zero.
    """
    n = _require_n(n)
    beta0 = float(curve.type2_at(0.0, n))
    integral = _type2_prior_integral(prior, curve, n, spec)
    return prior.q * (1.0 - beta0) + (1.0 - prior.q) * (1.0 - integral)


def _mixed_posterior(
    prior: MixedPrior,
    curve: TestPowerCurve,
    n: int,
    spec: QuadratureSpec,
    significant: bool,
) -> MixedPosterior:
    n = _require_n(n)
    beta0 = float(curve.type2_at(0.0, n))
    integral = _type2_prior_integral(prior, curve, n, spec)
    if significant:
        atom_lik = 1.0 - beta0
        continuous_total = 1.0 - integral
    else:
        atom_lik = beta0
        continuous_total = integral
    event_probability = prior.q * atom_lik + (1.0 - prior.q) * continuous_total
    if not event_probability >= 1e-300:
        raise DegenerateConditioningError(
            f"conditioning event has probability {event_probability!r}"
        )

    def continuous_density(theta):
        beta = np.asarray(curve.type2_at(theta, n), dtype=float)
        lik = 1.0 - beta if significant else beta
        out = (
            (1.0 - prior.q)
            * lik
            * np.asarray(prior.continuous_density(theta), dtype=float)
            / event_probability
        )
        return float(out) if np.ndim(theta) == 0 else out

    return MixedPosterior(
        mass_at_zero=prior.q * atom_lik / event_probability,
        continuous_density=continuous_density,
        event_probability=event_probability,
        support=prior.continuous_support,
        quad_splits=_power_splits(n, prior.continuous_support),
    )


def posterior_given_significance(
    prior: MixedPrior,
    curve: TestPowerCurve,
    n: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MixedPosterior:
    """Exact finite-n posterior given T_n > c.

    mass_at_zero = q (1 - beta_n(0)) / Pr(T_n > c); the continuous part is
    the prior density reweighted by the power 1 - beta_n. As n grows the
    density ratio to the prior tends to 1 / (q alpha + (1 - q)) at
    theta != 0 and the density at zero to alpha times its prior value.
    """
    return _mixed_posterior(prior, curve, n, spec, significant=True)


def posterior_given_nonsignificance(
    prior: MixedPrior,
    curve: TestPowerCurve,
    n: int,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> MixedPosterior:
    """Exact finite-n posterior given T_n <= c.

    The likelihood is beta_n itself. For q > 0 the posterior mass at zero
    tends to one; for q = 0 the posterior concentrates around zero with no
    limiting density, so only finite-n evaluation is offered.
    """
    return _mixed_posterior(prior, curve, n, spec, significant=False)


def significance_ratio_limit(q: float, alpha: float) -> float:
    """Large-n posterior/prior density ratio at theta != 0 after significance:
    1 / (q alpha + (1 - q)).

    Equals 1 at q = 0 (significance is asymptotically uninformative about
    nonzero values under a continuous prior) and rises to 1/alpha as
    q -> 1. Increasing in q, decreasing in alpha.
    """
    if not (math.isfinite(q) and 0.0 <= q < 1.0):
        raise DomainError(f"q must lie in [0, 1), got {q!r}")
    if not (math.isfinite(alpha) and 0.0 < alpha < 1.0):
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return 1.0 / (q * alpha + (1.0 - q))


def doubling_threshold(alpha: float) -> float:
    """Smallest q for which significance at least doubles the density at
    theta != 0 in the limit: 1 / (2 (1 - alpha)). Always above one half.
    """
    if not (math.isfinite(alpha) and 0.0 < alpha < 0.5):
        raise DomainError(f"alpha must lie in (0, 0.5), got {alpha!r}")
    return 1.0 / (2.0 * (1.0 - alpha))


def decay_rate_estimate(
    curve: TestPowerCurve, theta: float, n_grid: tuple[int, ...] | list[int]
) -> float:
    """Exponential decay rate of the Type II error at a fixed alternative:
    the limit of -(1/n) log beta_n(theta).

    Evaluates the sequence on ``n_grid`` in log space (beta_n underflows
    long before the asymptote is visible) and removes the leading
    n**-1/2 and n**-1 correction terms by Richardson extrapolation. For
    the Normal curve the limit is theta^2 / 2; the grid (100, 1000, 10000)
    recovers it to a few parts in 10^4.
    """
    theta = float(theta)
    if not math.isfinite(theta) or theta == 0.0:
        raise DomainError("theta must be finite and nonzero")
    ns = [int(n) for n in n_grid]
    if len(ns) < 3:
        raise DomainError("n_grid must contain at least three sample sizes")
    if any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 1:
        raise DomainError("n_grid must be strictly increasing and positive")

    values = [-float(curve.log_beta(theta, n)) / n for n in ns]
    grid = [float(n) for n in ns]
    for exponent in (0.5, 1.0):
        if len(values) < 2:
            break
        weights = [g**exponent for g in grid]
        values = [
            (values[k + 1] * weights[k + 1] - values[k] * weights[k])
            / (weights[k + 1] - weights[k])
            for k in range(len(values) - 1)
        ]
        grid = grid[1:]
    return values[-1]


def local_power_mass(
    curve: TestPowerCurve,
    n: int,
    z_halfwidth: float = 50.0,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Integral of beta_n(z / sqrt(n)) over |z| <= z_halfwidth.

    A diagnostic for the imperfect-local-asymptotic-power assumption: the
    limits computed here require this mass to stay bounded away from zero,
    and a curve for which it is already below 1e-6 at a large test n
    almost certainly violates the assumption, so a warning is emitted.
    For the Normal curve the value is 2c for any n.
    """
    n = _require_n(n)
    root_n = math.sqrt(n)
    value = numerics.integrate_with_splits(
        lambda z: float(curve.type2_at(z / root_n, n)),
        (-float(z_halfwidth), float(z_halfwidth)),
        (0.0,),
        spec,
    )
    if value < 1e-6:
        warnings.warn(
            f"local power mass {value!r} at n={n}; the curve looks like it has "
            "perfect local asymptotic power, outside this module's assumptions",
            RuntimeWarning,
            stacklevel=2,
        )
    return value
