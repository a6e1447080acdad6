"""Foundation-layer checks: special functions, quadrature, root finding.

High-precision reference values come from mpmath at 40 digits (recomputed
live where cheap, frozen literals elsewhere).
"""

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigpost import (
    Bracket,
    BracketError,
    DomainError,
    QuadratureError,
    QuadratureSpec,
    find_root,
    integrate,
    integrate_with_splits,
    log_gaussian_interval_prob,
    std_normal_cdf,
    std_normal_log_cdf,
    std_normal_log_pdf,
    std_normal_pdf,
    std_normal_quantile,
)

mp.mp.dps = 40


# ---------------------------------------------------------------------------
# pdf
# ---------------------------------------------------------------------------


def test_pdf_at_zero():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)


def test_pdf_at_one():
    # 40-digit reference: 0.2419707245191433497...
    assert std_normal_pdf(1.0) == pytest.approx(0.2419707245191433, abs=1e-16)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=0.0, max_value=38.0))
def test_pdf_even_and_positive(x):
    assert std_normal_pdf(x) == std_normal_pdf(-x)
    assert std_normal_pdf(x) > 0.0


def test_pdf_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(DomainError):
            std_normal_pdf(bad)
        with pytest.raises(DomainError):
            std_normal_log_pdf(bad)


def test_log_pdf_matches_pdf_in_body_and_extends_past_underflow():
    for x in (-10.0, -2.5, 0.0, 1.0, 7.0):
        assert std_normal_log_pdf(x) == pytest.approx(
            math.log(std_normal_pdf(x)), abs=1e-12
        )
    assert std_normal_pdf(40.0) == 0.0  # double underflow
    assert std_normal_log_pdf(40.0) == pytest.approx(-800.9189385332046, abs=1e-10)


# ---------------------------------------------------------------------------
# cdf
# ---------------------------------------------------------------------------


def test_cdf_at_zero_is_half():
    assert std_normal_cdf(0.0) == 0.5


def test_cdf_at_196():
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-15)


def test_cdf_matches_high_precision_reference():
    # Full relative precision in the body; the last couple of bits erode
    # toward the underflow edge, where the log accessor is the right tool.
    for x in np.linspace(-6.0, 8.0, 57):
        reference = float(mp.ncdf(mp.mpf(float(x))))
        assert std_normal_cdf(float(x)) == pytest.approx(reference, rel=5e-15, abs=0)
    for x in np.linspace(-37.0, -6.0, 32):
        reference = float(mp.ncdf(mp.mpf(float(x))))
        assert std_normal_cdf(float(x)) == pytest.approx(reference, rel=2e-13, abs=0)


def test_cdf_symmetry_identity_on_random_grid():
    rng = np.random.default_rng(20240901)
    for x in rng.uniform(-8.0, 8.0, size=1000):
        assert abs(std_normal_cdf(float(x)) + std_normal_cdf(float(-x)) - 1.0) < 1e-14


@settings(max_examples=200, deadline=None)
@given(
    st.floats(min_value=-8.0, max_value=8.0),
    st.floats(min_value=1e-8, max_value=4.0),
)
def test_cdf_monotone(x, step):
    assert std_normal_cdf(x + step) >= std_normal_cdf(x)


def test_cdf_rejects_non_finite():
    for bad in (math.nan, math.inf, -math.inf):
        with pytest.raises(DomainError):
            std_normal_cdf(bad)


def test_deep_tail_needs_log_accessor():
    # The plain value rounds to zero long before -50; the log stays finite.
    assert std_normal_cdf(-50.0) == 0.0
    log_value = std_normal_log_cdf(-50.0)
    assert math.isfinite(log_value)
    assert log_value == pytest.approx(-1254.8313611394199, abs=1e-9)
    assert log_value < math.log(1e-300)
    assert std_normal_log_cdf(-300.0) == pytest.approx(
        float(mp.log(mp.ncdf(-300))), rel=1e-13
    )


def test_log_cdf_matches_log_of_cdf_in_body():
    for x in (-8.0, -1.0, 0.0, 2.0, 5.0):
        assert std_normal_log_cdf(x) == pytest.approx(
            math.log(std_normal_cdf(x)), rel=1e-13, abs=1e-15
        )


# ---------------------------------------------------------------------------
# quantile
# ---------------------------------------------------------------------------


def test_quantile_median_is_zero():
    assert std_normal_quantile(0.5) == 0.0


def test_quantile_standard_values():
    assert std_normal_quantile(0.975) == pytest.approx(1.9599639845400545, abs=1e-12)
    assert std_normal_quantile(0.95) == pytest.approx(1.6448536269514722, abs=1e-12)


def test_quantile_domain():
    for bad in (0.0, 1.0, -0.2, 1.5, math.nan):
        with pytest.raises(DomainError):
            std_normal_quantile(bad)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-10, max_value=0.5))
def test_quantile_antisymmetry(p):
    # The identity is exact in the reals; in doubles, forming 1 - p rounds
    # away up to spacing(1-p), worth spacing/pdf in x units for small p.
    x = std_normal_quantile(p)
    tol = 1e-12 + float(np.spacing(1.0 - p)) / std_normal_pdf(x)
    assert abs(std_normal_quantile(1.0 - p) + x) <= tol


def test_cdf_of_quantile_recovers_p():
    for p in (1e-300, 1e-12, 0.025, 0.3, 0.5, 0.9, 0.975, 1 - 1e-12):
        assert abs(std_normal_cdf(std_normal_quantile(p)) - p) < 1e-12


def test_quantile_of_cdf_roundtrip():
    """quantile(cdf(x)) = x to 1e-10 wherever double rounding of p permits.

    In the upper tail, cdf(x) is a double squeezed against 1 with absolute
    spacing 2^-53, and inverting that rounded value moves x by up to
    spacing / pdf(x) (about 9e-9 at x = 6) no matter how the functions are
    computed. The tolerance carries exactly that representation term.
    """
    for x in np.linspace(-6.0, 6.0, 241):
        x = float(x)
        p = std_normal_cdf(x)
        tol = 1e-10 + float(np.spacing(p)) / std_normal_pdf(x)
        assert abs(std_normal_quantile(p) - x) <= tol


def test_quantile_of_cdf_roundtrip_plain_tolerance_below_five():
    for x in np.linspace(-6.0, 5.0, 221):
        p = std_normal_cdf(float(x))
        assert abs(std_normal_quantile(p) - float(x)) <= 1e-10


# ---------------------------------------------------------------------------
# log-space interval probability
# ---------------------------------------------------------------------------


def test_interval_prob_matches_cdf_difference():
    for mean, lo, hi in [(0.0, -1.0, 1.0), (2.5, 0.0, 1.96), (-4.0, -2.0, 7.0)]:
        direct = std_normal_cdf(hi - mean) - std_normal_cdf(lo - mean)
        value = math.exp(log_gaussian_interval_prob(mean, 1.0, lo, hi))
        assert value == pytest.approx(direct, rel=1e-12)


def test_interval_prob_deep_tail():
    # Pr(0 < X <= c) for X ~ N(300, 1): both cdf terms underflow doubles.
    log_p = log_gaussian_interval_prob(300.0, 1.0, 0.0, 1.96)
    reference = float(mp.log(mp.ncdf(mp.mpf("1.96") - 300) - mp.ncdf(mp.mpf(0) - 300)))
    assert log_p == pytest.approx(reference, rel=1e-10)


def test_interval_prob_half_lines_and_vectorization():
    means = np.array([-3.0, 0.0, 4.5])
    upper = log_gaussian_interval_prob(means, 2.0, -math.inf, 1.0)
    for mean, value in zip(means, upper):
        assert value == pytest.approx(std_normal_log_cdf((1.0 - mean) / 2.0), rel=1e-13)
    lower = log_gaussian_interval_prob(means, 2.0, 1.0, math.inf)
    for mean, value in zip(means, lower):
        assert value == pytest.approx(std_normal_log_cdf((mean - 1.0) / 2.0), rel=1e-13)


def test_interval_prob_domain():
    with pytest.raises(DomainError):
        log_gaussian_interval_prob(0.0, 0.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        log_gaussian_interval_prob(0.0, 1.0, 1.0, -1.0)
    with pytest.raises(DomainError):
        log_gaussian_interval_prob(math.inf, 1.0, -1.0, 1.0)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


def test_integrate_normal_density_normalizes():
    assert integrate(std_normal_pdf, (-10.0, 10.0)) == pytest.approx(1.0, abs=1e-10)


def test_integrate_odd_integrand_vanishes():
    value = integrate(lambda x: x * std_normal_pdf(x), (-10.0, 10.0))
    assert value == pytest.approx(0.0, abs=1e-10)


def test_integrate_cdf_times_pdf():
    # E[Phi(X)] = Pr(X' < X) = 1/2 for independent standard Normals.
    value = integrate(lambda x: std_normal_cdf(x) * std_normal_pdf(x), (-10.0, 10.0))
    assert value == pytest.approx(0.5, abs=1e-8)


def test_integrate_linearity():
    rng = np.random.default_rng(7)
    f = std_normal_pdf
    g = lambda x: (x * x - 0.5 * x) * std_normal_pdf(x)  # noqa: E731
    int_f = integrate(f, (-10.0, 10.0))
    int_g = integrate(g, (-10.0, 10.0))
    for _ in range(5):
        a, b = rng.uniform(-3.0, 3.0, size=2)
        combined = integrate(lambda x: a * f(x) + b * g(x), (-10.0, 10.0))
        assert combined == pytest.approx(
            a * int_f + b * int_g, abs=1e-9 * (1.0 + abs(a) + abs(b))
        )


def test_integrate_orientation_and_degenerate_window():
    assert integrate(std_normal_pdf, (2.0, -2.0)) == pytest.approx(
        -integrate(std_normal_pdf, (-2.0, 2.0)), rel=1e-14
    )
    assert integrate(std_normal_pdf, (1.0, 1.0)) == 0.0


def test_integrate_budget_exhaustion_carries_best_estimate():
    spec = QuadratureSpec(abs_tol=1e-13, rel_tol=1e-13, max_subdivisions=3)
    with pytest.raises(QuadratureError) as excinfo:
        integrate(lambda x: math.sin(50.0 * x), (0.0, 10.0), spec)
    assert math.isfinite(excinfo.value.best_estimate)
    assert excinfo.value.error_bound > 0.0


def test_integrate_rejects_non_finite_integrand():
    with pytest.raises(DomainError):
        integrate(lambda x: math.inf if x == 0.0 else 1.0, (-1.0, 1.0))


def test_integrate_with_splits_anchors_narrow_feature():
    # A bump of width 2e-4 at an interior point is invisible to samples at
    # panel midpoints unless a split anchors it.
    center, width = 0.3, 1e-4

    def bump(x):
        return math.exp(-((x - center) / width) ** 2)

    exact = width * math.sqrt(math.pi)  # tails are negligible at this width
    value = integrate_with_splits(bump, (-8.0, 9.0), (center,))
    assert value == pytest.approx(exact, rel=1e-8)


def test_quadrature_spec_validation():
    with pytest.raises(DomainError):
        QuadratureSpec(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureSpec(rel_tol=-1.0)
    with pytest.raises(DomainError):
        QuadratureSpec(max_subdivisions=0)
    with pytest.raises(DomainError):
        QuadratureSpec(tail_halfwidth_sigmas=4.0)


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------


def test_find_root_linear():
    root = find_root(lambda x: x - 2.0, Bracket(0.0, 5.0), tol=1e-12)
    assert root == pytest.approx(2.0, abs=1e-12)


def test_find_root_matches_quantile():
    root = find_root(lambda x: std_normal_cdf(x) - 0.975, Bracket(0.0, 5.0), tol=1e-13)
    assert root == pytest.approx(1.9599639845400545, abs=1e-10)


def test_find_root_sqrt_two():
    root = find_root(lambda x: x * x - 2.0, Bracket(1.0, 2.0), tol=1e-12)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-9)


def test_find_root_bracket_independence():
    f = lambda x: std_normal_cdf(x) - 0.7  # noqa: E731
    a = find_root(f, Bracket(-5.0, 5.0), tol=1e-13)
    b = find_root(f, Bracket(0.1, 1.0), tol=1e-13)
    assert a == pytest.approx(b, abs=1e-12)


def test_find_root_requires_sign_change():
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1.0, Bracket(-1.0, 1.0))


def test_find_root_endpoint_root_returned():
    assert find_root(lambda x: x, Bracket(0.0, 1.0)) == 0.0


def test_bracket_validation():
    with pytest.raises(DomainError):
        Bracket(2.0, 1.0)
    with pytest.raises(DomainError):
        Bracket(0.0, math.inf)
