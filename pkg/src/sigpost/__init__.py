"""Posteriors conditional on the outcome of a significance test.

An agent holds a prior over a parameter theta and learns only whether a
test rejected (possibly refined by the sign of the estimate), not the data
behind the verdict. This package computes the resulting limited-
information posteriors in closed form for the conjugate Normal model, for
general priors driven by a test power curve (including priors with a point
mass at zero), and for interval nulls; exposes the large-sample limit
formulas the finite-n posteriors converge to; and verifies every analytic
result against a seeded Monte Carlo oracle that simulates the full
generative process.
"""

__version__ = "0.1.0"

from .errors import (
    BracketError,
    DegenerateConditioningError,
    DomainError,
    InsufficientConditioningError,
    QuadratureError,
    SigpostError,
)
from .general_model import (
    MixedPosterior,
    MixedPrior,
    TestPowerCurve,
    decay_rate_estimate,
    doubling_threshold,
    local_power_mass,
    marginal_significance_probability,
    normal_mixed_prior,
    normal_power_curve,
    posterior_given_nonsignificance,
    posterior_given_significance,
    significance_ratio_limit,
)
from .interval_null import (
    IntervalNullDesign,
    approximate_critical_value,
    interval_posterior,
    interval_rejection_log_probability,
    interval_rejection_probability,
    solve_critical_value,
    solve_design,
)
from .mc_oracle import (
    ConditionalHistogram,
    CurveTest,
    McEstimate,
    SimulationPlan,
    compare_histogram_to_density,
    estimate_conditional_histogram,
    estimate_event_probability,
)
from .normal_model import (
    ConditionalPosterior,
    FullInfoPosterior,
    NormalPrior,
    PointNullDesign,
    SIGN_PARTITION,
    SignificanceEvent,
    TWO_SIDED_PARTITION,
    full_information_posterior,
    log_event_likelihood,
    log_event_probability,
    marginal_rejection_probability,
    marginal_rejection_probability_by_quadrature,
    posterior_given_event,
    rejection_probability_given_theta,
    sign_ratio_limit_nonsignificant,
    sign_ratio_limit_significant,
)
from .numerics import (
    Bracket,
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

__all__ = [
    "Bracket",
    "BracketError",
    "ConditionalHistogram",
    "ConditionalPosterior",
    "CurveTest",
    "DegenerateConditioningError",
    "DomainError",
    "FullInfoPosterior",
    "InsufficientConditioningError",
    "IntervalNullDesign",
    "McEstimate",
    "MixedPosterior",
    "MixedPrior",
    "NormalPrior",
    "PointNullDesign",
    "QuadratureError",
    "QuadratureSpec",
    "SIGN_PARTITION",
    "SigpostError",
    "SignificanceEvent",
    "SimulationPlan",
    "TWO_SIDED_PARTITION",
    "TestPowerCurve",
    "approximate_critical_value",
    "compare_histogram_to_density",
    "decay_rate_estimate",
    "doubling_threshold",
    "estimate_conditional_histogram",
    "estimate_event_probability",
    "find_root",
    "full_information_posterior",
    "integrate",
    "integrate_with_splits",
    "interval_posterior",
    "interval_rejection_log_probability",
    "interval_rejection_probability",
    "local_power_mass",
    "log_event_likelihood",
    "log_event_probability",
    "log_gaussian_interval_prob",
    "marginal_rejection_probability",
    "marginal_rejection_probability_by_quadrature",
    "marginal_significance_probability",
    "normal_mixed_prior",
    "normal_power_curve",
    "posterior_given_event",
    "posterior_given_nonsignificance",
    "posterior_given_significance",
    "rejection_probability_given_theta",
    "sign_ratio_limit_nonsignificant",
    "sign_ratio_limit_significant",
    "significance_ratio_limit",
    "solve_critical_value",
    "solve_design",
    "std_normal_cdf",
    "std_normal_log_cdf",
    "std_normal_log_pdf",
    "std_normal_pdf",
    "std_normal_quantile",
]
