"""Closed-form posterior machinery for the conjugate Normal model.

Oracles: mpmath at 40 digits for special values, explicit quadrature for
event probabilities, and direct Monte Carlo (numpy's own Normal sampler,
a code path fully disjoint from the package's inverse-cdf oracle) for
rejection probabilities.
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigpost import (
    DegenerateConditioningError,
    DomainError,
    NormalPrior,
    PointNullDesign,
    SIGN_PARTITION,
    SignificanceEvent,
    TWO_SIDED_PARTITION,
    full_information_posterior,
    integrate_with_splits,
    log_event_likelihood,
    log_event_probability,
    marginal_rejection_probability,
    marginal_rejection_probability_by_quadrature,
    posterior_given_event,
    rejection_probability_given_theta,
    sign_ratio_limit_nonsignificant,
    sign_ratio_limit_significant,
    std_normal_cdf,
)

mp.mp.dps = 40

FIG1_PRIOR = NormalPrior(1.0, 1.0)
FIG1_DESIGN = PointNullDesign(10, 1.96)
# 40-digit value of Phi((sqrt(10)-1.96)/sqrt(11)) + Phi((-sqrt(10)-1.96)/sqrt(11)).
FIG1_REJECTION = 0.7027536454144102


# ---------------------------------------------------------------------------
# rejection probability given theta
# ---------------------------------------------------------------------------


def test_size_at_the_null():
    value = rejection_probability_given_theta(0.0, PointNullDesign(7, 1.96))
    assert value == pytest.approx(2.0 * std_normal_cdf(-1.96), rel=1e-14)
    assert value == pytest.approx(0.05, abs=5e-6)


def test_rejection_certain_when_c_zero():
    assert rejection_probability_given_theta(0.0, PointNullDesign(5, 0.0)) == 1.0


def test_rejection_probability_monte_carlo_oracle():
    # theta fixed at 1, n = 10: simulate theta_hat ~ N(1, 1/10) directly.
    analytic = rejection_probability_given_theta(1.0, FIG1_DESIGN)
    rng = np.random.default_rng(314159)
    draws = 10**6
    theta_hat = 1.0 + rng.standard_normal(draws) / math.sqrt(10.0)
    frequency = np.mean(np.abs(math.sqrt(10.0) * theta_hat) > 1.96)
    se = math.sqrt(frequency * (1.0 - frequency) / draws)
    assert abs(analytic - frequency) < 4.0 * se


@settings(max_examples=100, deadline=None)
@given(st.floats(min_value=0.0, max_value=50.0))
def test_rejection_probability_even(theta):
    design = PointNullDesign(4, 2.5)
    assert rejection_probability_given_theta(theta, design) == pytest.approx(
        rejection_probability_given_theta(-theta, design), rel=1e-12
    )


def test_rejection_probability_minimized_at_zero():
    design = PointNullDesign(25, 1.96)
    floor = rejection_probability_given_theta(0.0, design)
    for theta in np.linspace(-2.0, 2.0, 41):
        assert rejection_probability_given_theta(float(theta), design) >= floor


def test_rejection_probability_rejects_non_finite():
    with pytest.raises(DomainError):
        rejection_probability_given_theta(math.nan, FIG1_DESIGN)


# ---------------------------------------------------------------------------
# marginal rejection probability
# ---------------------------------------------------------------------------


def test_marginal_rejection_headline_value():
    assert marginal_rejection_probability(FIG1_PRIOR, FIG1_DESIGN) == pytest.approx(
        FIG1_REJECTION, abs=1e-13
    )


def test_marginal_rejection_closed_form_vs_quadrature():
    for prior, design in [
        (FIG1_PRIOR, FIG1_DESIGN),
        (NormalPrior(-0.7, 2.3), PointNullDesign(400, 2.8)),
        (NormalPrior(0.0, 0.4), PointNullDesign(1, 1.0)),
    ]:
        closed = marginal_rejection_probability(prior, design)
        quad = marginal_rejection_probability_by_quadrature(prior, design)
        assert abs(closed - quad) < 1e-8


def test_marginal_rejection_small_sample_value():
    # mu=0, sigma=1, n=1: reduces to 2 Phi(-c / sqrt(2)).
    value = marginal_rejection_probability(NormalPrior(0.0, 1.0), PointNullDesign(1, 1.96))
    reference = float(2 * mp.ncdf(-mp.mpf("1.96") / mp.sqrt(2)))
    assert value == pytest.approx(reference, rel=1e-13)
    rng = np.random.default_rng(99)
    draws = 10**6
    theta = rng.standard_normal(draws)
    theta_hat = theta + rng.standard_normal(draws)
    frequency = np.mean(np.abs(theta_hat) > 1.96)
    se = math.sqrt(frequency * (1 - frequency) / draws)
    assert abs(value - frequency) < 4.0 * se


def test_marginal_rejection_tends_to_one_for_centered_prior():
    prior = NormalPrior(0.0, 1.0)
    values = [
        marginal_rejection_probability(prior, PointNullDesign(n, 1.96))
        for n in (10, 100, 10**4, 10**6)
    ]
    assert all(b > a for a, b in zip(values, values[1:]))
    assert values[-1] > 0.998


def test_marginal_rejection_monotone_decreasing_in_c():
    values = [
        marginal_rejection_probability(FIG1_PRIOR, PointNullDesign(10, c))
        for c in (0.5, 1.0, 1.96, 2.6, 3.3, 4.0)
    ]
    assert all(b < a for a, b in zip(values, values[1:]))


def test_marginal_rejection_monotone_increasing_in_n_off_center():
    values = [
        marginal_rejection_probability(FIG1_PRIOR, PointNullDesign(n, 1.96))
        for n in (1, 2, 5, 10, 100, 1000, 10**4, 10**5, 10**6)
    ]
    assert all(b > a for a, b in zip(values, values[1:]))


# ---------------------------------------------------------------------------
# conditional posteriors
# ---------------------------------------------------------------------------


def test_significant_posterior_density_at_zero():
    posterior = posterior_given_event(FIG1_PRIOR, FIG1_DESIGN, SignificanceEvent.SIGNIFICANT)
    reference = float(
        mp.npdf(mp.mpf(0) - 1) * 2 * mp.ncdf(-mp.mpf("1.96")) / mp.mpf(FIG1_REJECTION)
    )
    assert posterior.density(0.0) == pytest.approx(reference, rel=1e-11)
    assert posterior.density(0.0) == pytest.approx(0.01721445015600469, rel=1e-10)


def test_posterior_normalization_every_event():
    for event in SignificanceEvent:
        posterior = posterior_given_event(FIG1_PRIOR, FIG1_DESIGN, event)
        assert posterior.mass() == pytest.approx(1.0, abs=1e-6)


def test_posterior_bayes_consistency_pointwise():
    grid = np.linspace(-6.0, 8.0, 1000)
    for event in (SignificanceEvent.SIGNIFICANT, SignificanceEvent.NON_SIGNIFICANT_POSITIVE):
        posterior = posterior_given_event(FIG1_PRIOR, FIG1_DESIGN, event)
        lhs = posterior.density(grid) * posterior.event_probability
        rhs = np.exp(log_event_likelihood(event, FIG1_DESIGN, grid)) * FIG1_PRIOR.pdf(grid)
        mask = rhs > 0
        assert np.max(np.abs(lhs[mask] / rhs[mask] - 1.0)) < 1e-10


@pytest.mark.parametrize("partition", [TWO_SIDED_PARTITION, SIGN_PARTITION])
def test_mixture_identity(partition):
    # Law of total probability: the prior is the event-probability-weighted
    # mixture of the conditional posteriors, pointwise.
    grid = np.linspace(-6.0, 8.0, 501)
    total = np.zeros_like(grid)
    for event in partition:
        posterior = posterior_given_event(FIG1_PRIOR, FIG1_DESIGN, event)
        total += posterior.event_probability * posterior.density(grid)
    prior_density = FIG1_PRIOR.pdf(grid)
    assert np.max(np.abs(total / prior_density - 1.0)) < 1e-10


@pytest.mark.parametrize("partition", [TWO_SIDED_PARTITION, SIGN_PARTITION])
def test_event_probabilities_partition_to_one(partition):
    total = sum(
        math.exp(log_event_probability(event, FIG1_PRIOR, FIG1_DESIGN))
        for event in partition
    )
    assert total == pytest.approx(1.0, abs=1e-12)


def test_symmetry_for_centered_prior():
    prior = NormalPrior(0.0, 1.0)
    design = PointNullDesign(10, 1.96)
    grid = np.linspace(0.0, 5.0, 101)
    for event in TWO_SIDED_PARTITION:
        posterior = posterior_given_event(prior, design, event)
        assert np.allclose(
            posterior.density(grid), posterior.density(-grid), rtol=1e-12
        )
    positive = posterior_given_event(
        prior, design, SignificanceEvent.SIGNIFICANT_POSITIVE
    )
    negative = posterior_given_event(
        prior, design, SignificanceEvent.SIGNIFICANT_NEGATIVE
    )
    assert np.allclose(positive.density(grid), negative.density(-grid), rtol=1e-12)


def _posterior_sd(posterior) -> float:
    lo, hi = posterior.support_hint
    mean = integrate_with_splits(
        lambda t: t * posterior.density(t), (lo, hi), posterior.quad_splits
    )
    second = integrate_with_splits(
        lambda t: t * t * posterior.density(t), (lo, hi), posterior.quad_splits
    )
    return math.sqrt(second - mean * mean)


def test_nonsignificant_posterior_concentrates_with_n():
    small = posterior_given_event(
        FIG1_PRIOR, PointNullDesign(100, 1.96), SignificanceEvent.NON_SIGNIFICANT
    )
    large = posterior_given_event(
        FIG1_PRIOR, PointNullDesign(10**4, 1.96), SignificanceEvent.NON_SIGNIFICANT
    )
    assert _posterior_sd(large) < _posterior_sd(small)
    assert large.mass(-0.1, 0.1) > 0.99


def test_significance_becomes_local_to_zero():
    # At n = 10^6 the significant posterior is within a tenth of a percent
    # of the prior away from zero.
    design = PointNullDesign(10**6, 1.96)
    posterior = posterior_given_event(FIG1_PRIOR, design, SignificanceEvent.SIGNIFICANT)
    ratio = posterior.density(1.0) / float(FIG1_PRIOR.pdf(1.0))
    assert 0.999 <= ratio <= 1.001


def test_degenerate_conditioning_raises():
    # A prior far from zero makes a negative significant estimate
    # astronomically unlikely.
    prior = NormalPrior(40.0, 0.1)
    design = PointNullDesign(10**4, 1.96)
    with pytest.raises(DegenerateConditioningError):
        posterior_given_event(prior, design, SignificanceEvent.SIGNIFICANT_NEGATIVE)
    with pytest.raises(DegenerateConditioningError):
        posterior_given_event(
            NormalPrior(0.0, 1.0), PointNullDesign(4, 0.0), SignificanceEvent.NON_SIGNIFICANT
        )


def test_support_hint_covers_transition_region():
    design = PointNullDesign(1, 30.0)
    posterior = posterior_given_event(
        NormalPrior(0.0, 1.0), design, SignificanceEvent.NON_SIGNIFICANT
    )
    lo, hi = posterior.support_hint
    assert lo < -30.0 and hi > 30.0


# ---------------------------------------------------------------------------
# full-information posterior
# ---------------------------------------------------------------------------


def test_full_information_equal_precision_average():
    prior = NormalPrior(0.0, 1.0)
    for theta_hat in (-1.3, 0.0, 2.4):
        posterior = full_information_posterior(prior, 1, theta_hat)
        assert posterior.mu_n == pytest.approx(theta_hat / 2.0, rel=1e-14, abs=1e-15)
        assert posterior.sigma_n == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-14)


def test_full_information_example_values():
    posterior = full_information_posterior(FIG1_PRIOR, 10, 0.5)
    assert posterior.mu_n == pytest.approx(6.0 / 11.0, rel=1e-14)
    assert posterior.sigma_n == pytest.approx(1.0 / math.sqrt(11.0), rel=1e-14)
    assert posterior.sigma_n < FIG1_PRIOR.sigma


def test_full_information_matches_quadrature_of_product():
    # Normalize prior(theta) * N(theta_hat | theta, 1/n) numerically and
    # compare moments.
    prior, n, theta_hat = NormalPrior(1.0, 1.0), 10, 0.5
    posterior = full_information_posterior(prior, n, theta_hat)

    def product(theta: float) -> float:
        like = math.exp(-0.5 * n * (theta_hat - theta) ** 2)
        return like * float(prior.pdf(theta))

    window = (-9.0, 11.0)
    norm = integrate_with_splits(product, window)
    mean = integrate_with_splits(lambda t: t * product(t), window) / norm
    second = integrate_with_splits(lambda t: t * t * product(t), window) / norm
    assert mean == pytest.approx(posterior.mu_n, abs=1e-10)
    assert math.sqrt(second - mean * mean) == pytest.approx(posterior.sigma_n, abs=1e-9)


def test_full_information_rejects_bad_n():
    with pytest.raises(DomainError):
        full_information_posterior(FIG1_PRIOR, 0, 0.5)
    with pytest.raises(DomainError):
        full_information_posterior(FIG1_PRIOR, 2.5, 0.5)


# ---------------------------------------------------------------------------
# sign-conditioned ratio limits
# ---------------------------------------------------------------------------


def test_sign_ratio_limit_positive_branch():
    value = sign_ratio_limit_significant(FIG1_PRIOR, 1.96, 2.0)
    reference = float(1 / mp.ncdf(1))
    assert value == pytest.approx(reference, rel=1e-13)
    assert value == pytest.approx(1.188573417345060, rel=1e-12)


def test_sign_ratio_limit_negative_branch_is_zero():
    for prior in (FIG1_PRIOR, NormalPrior(-2.0, 0.5)):
        assert sign_ratio_limit_significant(prior, 1.96, -1.0) == 0.0


def test_sign_ratio_limit_at_zero_branch():
    value = sign_ratio_limit_significant(FIG1_PRIOR, 1.96, 0.0)
    assert value == pytest.approx(
        std_normal_cdf(-1.96) / std_normal_cdf(1.0), rel=1e-13
    )


def test_sign_ratio_limit_doubles_at_most_for_centered_prior():
    assert sign_ratio_limit_significant(NormalPrior(0.0, 3.0), 1.96, 1.0) == 2.0


def test_sign_ratio_limit_matches_finite_n():
    # Finite-n ratio at n = 10^6 sits within 1e-3 of the limit.
    design = PointNullDesign(10**6, 1.96)
    posterior = posterior_given_event(
        FIG1_PRIOR, design, SignificanceEvent.SIGNIFICANT_POSITIVE
    )
    finite = posterior.density(2.0) / float(FIG1_PRIOR.pdf(2.0))
    limit = sign_ratio_limit_significant(FIG1_PRIOR, 1.96, 2.0)
    assert abs(finite - limit) < 1e-3


def test_sign_ratio_nonsignificant_branches():
    assert sign_ratio_limit_nonsignificant(1.0) == 0.0
    assert sign_ratio_limit_nonsignificant(-3.0) == 0.0
    assert sign_ratio_limit_nonsignificant(0.0) == math.inf


# ---------------------------------------------------------------------------
# type validation
# ---------------------------------------------------------------------------


def test_prior_validation():
    with pytest.raises(DomainError):
        NormalPrior(0.0, 0.0)
    with pytest.raises(DomainError):
        NormalPrior(math.nan, 1.0)


def test_design_validation():
    with pytest.raises(DomainError):
        PointNullDesign(0, 1.96)
    with pytest.raises(DomainError):
        PointNullDesign(10, -1.0)
    with pytest.raises(DomainError):
        PointNullDesign(2.5, 1.96)
