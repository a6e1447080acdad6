"""Scalar numerics underpinning every other module.

Three ingredients:

* standard-Normal special functions (pdf, cdf, quantile), each with a
  log-space companion that stays meaningful far beyond the point where the
  plain value underflows double precision (the cdf underflows near
  x = -38.5, its log is finite for any finite x);
* adaptive Simpson quadrature over finite windows, with an explicit
  subdivision budget;
* bracketed root finding: bisection interleaved with a secant acceleration
  step that falls back to bisection whenever the secant iterate leaves the
  bracket, so convergence is guaranteed.

The cdf is evaluated through the complementary error function
(``0.5 * erfc(-x / sqrt(2))``), giving relative error at the 1e-16 level in
the body of the distribution; the log-cdf and quantile are backed by the
scipy.special implementations of the same expansions (``log_ndtr``,
``ndtri``).

All operations are pure functions of their inputs; there is no shared
mutable state, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import log_ndtr, ndtri

from .errors import BracketError, DomainError, QuadratureError

__all__ = [
    "Bracket",
    "DEFAULT_QUADRATURE",
    "QuadratureSpec",
    "find_root",
    "integrate",
    "integrate_with_splits",
    "log_gaussian_interval_prob",
    "std_normal_cdf",
    "std_normal_log_cdf",
    "std_normal_log_pdf",
    "std_normal_pdf",
    "std_normal_quantile",
]

_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for :func:`integrate`.

    ``tail_halfwidth_sigmas`` is how many prior standard deviations a
    prior-weighted integration window extends on each side of its center;
    Normal-type tails contribute less than 1e-22 beyond 10 sigma, so the
    default of 10 loses nothing at the tolerances used here.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2**16
    tail_halfwidth_sigmas: float = 10.0

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0.0 and self.rel_tol > 0.0):
            raise DomainError("abs_tol and rel_tol must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if not self.tail_halfwidth_sigmas >= 6.0:
            raise DomainError("tail_halfwidth_sigmas must be >= 6")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class Bracket:
    """An interval [lo, hi] expected to enclose a sign change.

    The sign change itself is checked at solve time by :func:`find_root`.
    """

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise DomainError("bracket endpoints must be finite")
        if not self.lo < self.hi:
            raise DomainError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


def _require_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def std_normal_pdf(x: float) -> float:
    """Density of N(0,1) at ``x``: (2*pi)**-0.5 * exp(-x**2 / 2).

    Even in ``x``; strictly positive until the result underflows double
    precision (|x| ~ 38.6), use :func:`std_normal_log_pdf` past that.
    """
    x = _require_finite(x)
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def std_normal_log_pdf(x: float) -> float:
    """log of :func:`std_normal_pdf`, exact arbitrarily far into the tails."""
    x = _require_finite(x)
    return -0.5 * x * x - _LOG_SQRT_2PI


def std_normal_cdf(x: float) -> float:
    """Phi(x), the standard Normal distribution function.

    Computed as ``0.5 * erfc(-x / sqrt(2))``; relative error is at the
    1e-16 level in the body and the value satisfies
    Phi(x) + Phi(-x) = 1 to within a couple of ulps. Underflows to 0.0
    below x ~ -38.5; :func:`std_normal_log_cdf` covers that regime.
    """
    x = _require_finite(x)
    return 0.5 * math.erfc(-x / _SQRT2)


def std_normal_log_cdf(x: float) -> float:
    """log Phi(x), finite for any finite ``x``.

    For example log Phi(-300) ~ -45010.3, where the plain cdf is far below
    the smallest positive double. Needed whenever tail probabilities enter
    products or ratios (posterior densities at extreme critical values).
    """
    x = _require_finite(x)
    return float(log_ndtr(x))


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on (0, 1).

    Satisfies ``std_normal_cdf(std_normal_quantile(p)) = p`` to well below
    1e-12 and ``std_normal_quantile(1 - p) = -std_normal_quantile(p)`` up
    to rounding of ``1 - p``.
    """
    p = float(p)
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise DomainError(f"quantile requires 0 < p < 1, got {p!r}")
    return float(ndtri(p))


def log_gaussian_interval_prob(mean, sd: float, lo: float, hi: float):
    """log Pr(lo < X <= hi) for X ~ N(mean, sd**2), stable in both tails.

    ``mean`` may be a scalar or an ndarray; ``lo``/``hi`` may be infinite.
    The difference of cdfs is taken on whichever tail keeps both terms
    small (reflecting the interval through the mean when needed), so the
    result is a meaningful log-probability even when the plain interval
    probability underflows double precision. Returns -inf when the
    probability rounds to zero at the achievable precision.
    """
    mean_arr = np.asarray(mean, dtype=float)
    scalar = mean_arr.ndim == 0
    if not np.all(np.isfinite(mean_arr)):
        raise DomainError("mean must be finite")
    sd = float(sd)
    if not (math.isfinite(sd) and sd > 0.0):
        raise DomainError(f"sd must be positive and finite, got {sd!r}")
    if math.isnan(lo) or math.isnan(hi) or not lo <= hi:
        raise DomainError(f"interval requires lo <= hi, got ({lo}, {hi})")
    if lo == hi:
        # Zero-width interval: probability zero for a continuous variable.
        out = np.full_like(mean_arr, -math.inf)
        return float(out) if scalar else out

    if lo == -math.inf and hi == math.inf:
        out = np.zeros_like(mean_arr)
    elif lo == -math.inf:
        out = log_ndtr((hi - mean_arr) / sd)
    elif hi == math.inf:
        out = log_ndtr((mean_arr - lo) / sd)
    else:
        a = (lo - mean_arr) / sd
        b = (hi - mean_arr) / sd
        # Reflect so both cdf arguments sit on the small-value side.
        flip = (a + b) > 0.0
        a, b = np.where(flip, -b, a), np.where(flip, -a, b)
        log_hi = log_ndtr(b)
        log_lo = log_ndtr(a)
        with np.errstate(divide="ignore"):
            out = log_hi + np.log1p(-np.exp(log_lo - log_hi))
    return float(out) if scalar else out


def _feval(f: Callable[[float], float], x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise DomainError(f"integrand is not finite at x={x!r}: {y!r}")
    return y


def integrate(
    f: Callable[[float], float],
    window: tuple[float, float],
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Adaptive Simpson estimate of the integral of ``f`` over ``window``.

    Each panel is accepted once the classic Richardson discrepancy between
    its Simpson estimate and the two-half refinement is within 15x the
    panel's tolerance share, and the accepted value includes the
    Richardson correction. The overall target is
    ``max(abs_tol, rel_tol * |estimate|)``.

    Raises :class:`QuadratureError` carrying the best available estimate
    and an error bound when ``max_subdivisions`` panel splits are not
    enough. Smooth integrands with a handful of sharp transition regions
    (the only kind arising here) converge orders of magnitude sooner.
    """
    a, b = float(window[0]), float(window[1])
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration window must be finite")
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0

    fa, fb = _feval(f, a), _feval(f, b)
    m = 0.5 * (a + b)
    fm = _feval(f, m)
    s_whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    eps = max(spec.abs_tol, spec.rel_tol * abs(s_whole))

    # Work-list of panels: (a, b, fa, fm, fb, simpson, tolerance share).
    stack = [(a, b, fa, fm, fb, s_whole, eps)]
    total = 0.0
    splits = 0
    while stack:
        a1, b1, f1, f2, f3, s1, tol = stack.pop()
        m1 = 0.5 * (a1 + b1)
        lm = 0.5 * (a1 + m1)
        rm = 0.5 * (m1 + b1)
        if lm <= a1 or rm >= b1:
            # Panel width at the resolution of the floating-point grid.
            total += s1
            continue
        flm, frm = _feval(f, lm), _feval(f, rm)
        s_left = (m1 - a1) / 6.0 * (f1 + 4.0 * flm + f2)
        s_right = (b1 - m1) / 6.0 * (f2 + 4.0 * frm + f3)
        delta = (s_left + s_right) - s1
        if abs(delta) <= 15.0 * tol:
            total += s_left + s_right + delta / 15.0
            continue
        splits += 1
        if splits > spec.max_subdivisions:
            best = total + s_left + s_right + sum(p[5] for p in stack)
            bound = abs(delta) + sum(p[6] for p in stack)
            raise QuadratureError(
                f"subdivision budget {spec.max_subdivisions} exhausted "
                f"(best estimate {sign * best!r}, error bound {bound!r})",
                best_estimate=sign * best,
                error_bound=bound,
            )
        half = 0.5 * tol
        stack.append((a1, m1, f1, flm, f2, s_left, half))
        stack.append((m1, b1, f2, frm, f3, s_right, half))
    return sign * total


def integrate_with_splits(
    f: Callable[[float], float],
    window: tuple[float, float],
    splits: Iterable[float] = (),
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Integrate ``f`` over ``window``, forcing panel boundaries at ``splits``.

    Adaptive refinement homes in on a sharp feature reliably only when the
    feature is anchored at a panel boundary; posterior integrands here have
    transitions at known points (multiples of 1/sqrt(n)), so callers pass
    those. Split points outside the window are ignored.
    """
    a, b = float(window[0]), float(window[1])
    if a > b:
        return -integrate_with_splits(f, (b, a), splits, spec)
    pts = sorted({a, b, *(float(s) for s in splits if a < float(s) < b)})
    return sum(integrate(f, (lo, hi), spec) for lo, hi in zip(pts, pts[1:]))


def find_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: float = 1e-12,
) -> float:
    """Root of ``f`` inside ``bracket``.

    Alternates a secant step with a bisection step; the secant candidate is
    used only while it stays strictly inside the current bracket. The
    bracket width therefore halves at least once every two evaluations,
    which guarantees termination, while the secant step gives fast local
    convergence for the smooth monotone functions solved here.

    Raises :class:`BracketError` when f(lo) and f(hi) have the same sign.
    The result is independent of the particular valid bracket supplied, up
    to ``tol``.
    """
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    a, b = bracket.lo, bracket.hi
    fa = float(f(a))
    fb = float(f(b))
    if not (math.isfinite(fa) and math.isfinite(fb)):
        raise DomainError("f must be finite at the bracket endpoints")
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if (fa > 0.0) == (fb > 0.0):
        raise BracketError(
            f"no sign change on [{a}, {b}]: f(lo)={fa!r}, f(hi)={fb!r}"
        )

    use_secant = True
    while (b - a) > tol:
        x = math.nan
        if use_secant and fa != fb:
            x = b - fb * (b - a) / (fb - fa)
        if not a < x < b:
            x = a + 0.5 * (b - a)
        use_secant = not use_secant
        if x <= a or x >= b:
            break  # no representable point strictly inside
        fx = float(f(x))
        if fx == 0.0:
            return x
        if (fx > 0.0) == (fa > 0.0):
            a, fa = x, fx
        else:
            b, fb = x, fx
    return a + 0.5 * (b - a)
