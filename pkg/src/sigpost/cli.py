"""Command-line surface: figure tables as CSV, and the oracle check suite.

Subcommands ``figure1`` .. ``figure5`` reproduce the model's standard
displays as CSV curve tables (optionally also as a thin SVG line plot);
``posterior`` evaluates any single conditional posterior over a grid;
``verify`` runs the full analytic-vs-Monte-Carlo check suite and exits
nonzero if any check fails.

Output format: RFC-4180-style CSV, UTF-8, '.' decimal separator, metadata
as leading '#'-prefixed ``key=value`` comment lines, floats rendered with
repr (shortest round-trip form). Parsing an emitted table and re-emitting
it is byte-identical, and every table embeds the parameters needed to
regenerate it. Exit codes: 0 success, 1 check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import SigpostError
from .general_model import (
    normal_mixed_prior,
    normal_power_curve,
    posterior_given_nonsignificance,
    significance_ratio_limit,
)
from .interval_null import interval_posterior, solve_design
from .mc_oracle import (
    CurveTest,
    SimulationPlan,
    compare_histogram_to_density,
    estimate_conditional_histogram,
    estimate_event_probability,
)
from .normal_model import (
    NormalPrior,
    PointNullDesign,
    SIGN_PARTITION,
    SignificanceEvent,
    TWO_SIDED_PARTITION,
    posterior_given_event,
)

__all__ = [
    "CurveTable",
    "VerifyCheck",
    "figure1_table",
    "figure2_table",
    "figure3_table",
    "figure4_table",
    "figure5_table",
    "main",
    "posterior_table",
    "run_verification",
]

_EVENT_BY_NAME = {event.value: event for event in SignificanceEvent}


def _fmt(x: float) -> str:
    return repr(float(x))


@dataclass
class CurveTable:
    """Named columns of reals plus the metadata needed to regenerate them.

    The first column is the grid and must be strictly increasing.
    """

    column_names: list[str]
    rows: list[list[float]]
    metadata: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for row in self.rows:
            if len(row) != len(self.column_names):
                raise ValueError("every row must match the header length")
        grid = [row[0] for row in self.rows]
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("grid column must be strictly increasing")

    def to_csv(self) -> str:
        lines = [f"# {key}={value}" for key, value in self.metadata.items()]
        lines.append(",".join(self.column_names))
        lines.extend(",".join(_fmt(x) for x in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "CurveTable":
        metadata: dict[str, str] = {}
        header: list[str] | None = None
        rows: list[list[float]] = []
        for line in text.splitlines():
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                metadata[key] = value
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(part) for part in line.split(",")])
        if header is None:
            raise ValueError("no header line found")
        return cls(column_names=header, rows=rows, metadata=metadata)

    def column(self, name: str) -> np.ndarray:
        index = self.column_names.index(name)
        return np.array([row[index] for row in self.rows])

    def write(self, path: str | None) -> None:
        text = self.to_csv()
        if path is None or path == "-":
            sys.stdout.write(text)
        else:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)


def _base_metadata(command: str, **params) -> dict[str, str]:
    meta = {"command": command, "tool_version": __version__}
    for key, value in params.items():
        meta[key] = _fmt(value) if isinstance(value, float) else str(value)
    return meta


def _theta_grid(
    mu: float, sigma: float, points: int, lo: float | None, hi: float | None
) -> np.ndarray:
    if lo is None:
        lo = mu - 4.0 * sigma
    if hi is None:
        hi = mu + 4.0 * sigma
    if not lo < hi:
        raise ValueError("grid requires lo < hi")
    if points < 2:
        raise ValueError("need at least two grid points")
    return np.linspace(lo, hi, points)


def figure1_table(
    mu: float = 1.0,
    sigma: float = 1.0,
    n: int = 10,
    c: float = 1.96,
    points: int = 1001,
    lo: float | None = None,
    hi: float | None = None,
) -> CurveTable:
    """Prior and the two posteriors after a point-null significance verdict."""
    prior = NormalPrior(mu, sigma)
    design = PointNullDesign(n, c)
    grid = _theta_grid(mu, sigma, points, lo, hi)
    significant = posterior_given_event(prior, design, SignificanceEvent.SIGNIFICANT)
    nonsignificant = posterior_given_event(
        prior, design, SignificanceEvent.NON_SIGNIFICANT
    )
    prior_col = prior.pdf(grid)
    sig_col = significant.density(grid)
    nonsig_col = nonsignificant.density(grid)
    rows = [
        [t, p, s, ns]
        for t, p, s, ns in zip(grid, prior_col, sig_col, nonsig_col)
    ]
    return CurveTable(
        column_names=["theta", "prior", "post_significant", "post_nonsignificant"],
        rows=rows,
        metadata=_base_metadata("figure1", mu=mu, sigma=sigma, n=n, c=c, points=points),
    )


def figure2_table(
    mu: float = 1.0,
    sigma: float = 1.0,
    c: float = 1.96,
    n_list: tuple[int, ...] = (10, 100, 1000, 10000),
    points: int = 1001,
    lo: float | None = None,
    hi: float | None = None,
) -> CurveTable:
    """Prior vs the significance posterior as the sample size grows."""
    if not n_list:
        raise ValueError("n_list must be nonempty")
    prior = NormalPrior(mu, sigma)
    grid = _theta_grid(mu, sigma, points, lo, hi)
    columns = [prior.pdf(grid)]
    names = ["theta", "prior"]
    for n in n_list:
        posterior = posterior_given_event(
            prior, PointNullDesign(n, c), SignificanceEvent.SIGNIFICANT
        )
        columns.append(posterior.density(grid))
        names.append(f"post_significant_n{n}")
    rows = [[t, *(col[i] for col in columns)] for i, t in enumerate(grid)]
    meta = _base_metadata(
        "figure2", mu=mu, sigma=sigma, c=c, points=points,
        n_list=",".join(str(n) for n in n_list),
    )
    return CurveTable(column_names=names, rows=rows, metadata=meta)


def figure3_table(
    alpha_list: tuple[float, ...] = (0.05, 0.005), q_step: float = 0.005
) -> CurveTable:
    """Limiting posterior/prior ratio at nonzero theta as a function of q."""
    if not alpha_list:
        raise ValueError("alpha_list must be nonempty")
    if not 0.0 < q_step < 1.0:
        raise ValueError("q_step must lie in (0, 1)")
    steps = int(math.ceil(1.0 / q_step))
    qs = [k * q_step for k in range(steps) if k * q_step < 1.0]
    names = ["q"] + [f"ratio_alpha{_fmt(a)}" for a in alpha_list]
    rows = [
        [q, *(significance_ratio_limit(q, a) for a in alpha_list)] for q in qs
    ]
    meta = _base_metadata(
        "figure3",
        alpha_list=",".join(_fmt(a) for a in alpha_list),
        q_step=q_step,
    )
    return CurveTable(column_names=names, rows=rows, metadata=meta)


def figure4_table(
    mu: float = 1.0,
    sigma: float = 1.0,
    alpha: float = 0.05,
    n: int = 10000,
    delta_list: tuple[float, ...] = (0.5, 1.0, 2.0),
    points: int = 1001,
    lo: float = -4.0,
    hi: float = 4.0,
) -> CurveTable:
    """Posteriors after testing the interval null, one pair per delta.

    The solved critical value for each delta is recorded in the metadata.
    Note the default grid clips a visible sliver of the significant
    posterior's outer tails (about 0.9% of its mass at delta = 2); widen
    the grid when trapezoid mass on the grid needs to be closer to one.
    """
    if not delta_list:
        raise ValueError("delta_list must be nonempty")
    prior = NormalPrior(mu, sigma)
    grid = np.linspace(lo, hi, points)
    names = ["theta", "prior"]
    columns = [prior.pdf(grid)]
    meta = _base_metadata(
        "figure4", mu=mu, sigma=sigma, alpha=alpha, n=n, points=points,
        delta_list=",".join(_fmt(d) for d in delta_list),
    )
    for delta in delta_list:
        design = solve_design(n, delta, alpha)
        meta[f"c_delta_{_fmt(delta)}"] = _fmt(design.c)
        for significant, tag in ((True, "significant"), (False, "nonsignificant")):
            posterior = interval_posterior(prior, design, significant)
            columns.append(posterior.density(grid))
            names.append(f"post_{tag}_delta{_fmt(delta)}")
    rows = [[t, *(col[i] for col in columns)] for i, t in enumerate(grid)]
    return CurveTable(column_names=names, rows=rows, metadata=meta)


def figure5_table(
    mu: float = 1.0,
    sigma: float = 1.0,
    n: int = 10,
    c: float = 1.96,
    points: int = 1001,
    lo: float | None = None,
    hi: float | None = None,
) -> CurveTable:
    """Posteriors when the verdict is refined by the estimate's sign."""
    prior = NormalPrior(mu, sigma)
    design = PointNullDesign(n, c)
    grid = _theta_grid(mu, sigma, points, lo, hi)
    sig_pos = posterior_given_event(
        prior, design, SignificanceEvent.SIGNIFICANT_POSITIVE
    )
    nonsig_pos = posterior_given_event(
        prior, design, SignificanceEvent.NON_SIGNIFICANT_POSITIVE
    )
    rows = [
        [t, p, s, ns]
        for t, p, s, ns in zip(
            grid, prior.pdf(grid), sig_pos.density(grid), nonsig_pos.density(grid)
        )
    ]
    return CurveTable(
        column_names=["theta", "prior", "post_sig_positive", "post_nonsig_positive"],
        rows=rows,
        metadata=_base_metadata("figure5", mu=mu, sigma=sigma, n=n, c=c, points=points),
    )


def posterior_table(
    mu: float,
    sigma: float,
    n: int,
    event: SignificanceEvent,
    null: str = "point",
    c: float = 1.96,
    alpha: float = 0.05,
    delta: float = 1.0,
    points: int = 1001,
    lo: float | None = None,
    hi: float | None = None,
) -> CurveTable:
    """Grid evaluation of one conditional posterior, point or interval null."""
    prior = NormalPrior(mu, sigma)
    if null == "point":
        posterior = posterior_given_event(prior, PointNullDesign(n, c), event)
        solved_c = c
    elif null == "interval":
        if event not in TWO_SIDED_PARTITION:
            raise ValueError("interval nulls support only the two-way events")
        design = solve_design(n, delta, alpha)
        posterior = interval_posterior(
            prior, design, event is SignificanceEvent.SIGNIFICANT
        )
        solved_c = design.c
    else:
        raise ValueError(f"unknown null type {null!r}")
    grid = _theta_grid(mu, sigma, points, lo, hi)
    rows = [
        [t, p, d]
        for t, p, d in zip(grid, prior.pdf(grid), posterior.density(grid))
    ]
    meta = _base_metadata(
        "posterior", mu=mu, sigma=sigma, n=n, null=null, event=event.value,
        c=solved_c, points=points,
        event_probability=posterior.event_probability,
    )
    if null == "interval":
        meta["alpha"] = _fmt(alpha)
        meta["delta"] = _fmt(delta)
    return CurveTable(
        column_names=["theta", "prior", "posterior"], rows=rows, metadata=meta
    )


def _render_svg(table: CurveTable, path: str) -> None:
    # Thin display layer: no computation beyond what the table holds.
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    grid = table.column(table.column_names[0])
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for name in table.column_names[1:]:
        ax.plot(grid, table.column(name), label=name)
    ax.set_xlabel(table.column_names[0])
    ax.legend(loc="best", fontsize="small")
    ax.set_title(table.metadata.get("command", ""))
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


# ---------------------------------------------------------------------------
# verify: the analytic-vs-oracle check suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyCheck:
    name: str
    statistic: float
    threshold: float
    passed: bool


def _check(name: str, statistic: float, threshold: float) -> VerifyCheck:
    return VerifyCheck(
        name=name,
        statistic=float(statistic),
        threshold=float(threshold),
        passed=bool(statistic <= threshold),
    )


def _central_range(posterior, rel_floor: float = 5e-3, points: int = 2001):
    """Histogram support where the analytic density is non-negligible.

    The multinomial z-statistic is only approximately Normal in bins with
    double-digit expected counts; clipping the range where the density
    falls below ``rel_floor`` of its peak keeps every bin out of the
    Poisson regime. Draws outside the range still count toward the
    conditioning event, they are just not binned.
    """
    lo, hi = posterior.support_hint
    grid = np.linspace(lo, hi, points)
    density = posterior.density(grid)
    keep = np.nonzero(density >= rel_floor * float(np.max(density)))[0]
    return float(grid[keep[0]]), float(grid[keep[-1]])


def run_verification(
    draws: int = 1_000_000,
    seed: int = 42,
    z_threshold: float = 4.0,
    bins: int = 50,
) -> tuple[str, list[VerifyCheck]]:
    """Run every analytic-vs-oracle comparison and build a report.

    Deterministic given its arguments: identical inputs produce a
    byte-identical report. Checks cover the event probabilities and
    conditional histograms of all six events at the standard display
    parameters (mu=1, sigma=1, n=10, c=1.96), the exact partition sums,
    the mixed-prior limits, and a split-sample consistency probe.
    """
    checks: list[VerifyCheck] = []
    prior = NormalPrior(1.0, 1.0)
    design = PointNullDesign(10, 1.96)
    plan = SimulationPlan(
        draws=draws, seed=seed, bins=bins,
        range=(prior.mu - 4.0 * prior.sigma, prior.mu + 4.0 * prior.sigma),
    )

    probabilities: dict[SignificanceEvent, float] = {}
    for event in SignificanceEvent:
        posterior = posterior_given_event(prior, design, event)
        estimate = estimate_event_probability(prior, design, event, plan)
        probabilities[event] = estimate.value
        z = abs(estimate.value - posterior.event_probability) / estimate.std_error
        checks.append(_check(f"event-probability/{event.value}", z, z_threshold))
        event_plan = SimulationPlan(
            draws=draws, seed=seed, bins=bins, range=_central_range(posterior)
        )
        hist = estimate_conditional_histogram(prior, design, event, event_plan)
        z_sup = compare_histogram_to_density(
            hist, posterior.density, splits=posterior.quad_splits
        )
        checks.append(_check(f"histogram/{event.value}", z_sup, z_threshold))

    for tag, partition in (("two-way", TWO_SIDED_PARTITION), ("sign", SIGN_PARTITION)):
        gap = abs(sum(probabilities[event] for event in partition) - 1.0)
        checks.append(_check(f"partition-sum/{tag}", gap, 1e-12))

    # Mixed prior with an atom at zero, driven through the power curve.
    mixed = normal_mixed_prior(0.5)
    curve = normal_power_curve(1.96)
    big_n = CurveTest(curve, 10**6)
    analytic_limit = 0.5 * curve.alpha + 0.5
    estimate = estimate_event_probability(
        mixed, big_n, SignificanceEvent.SIGNIFICANT, plan
    )
    z = abs(estimate.value - analytic_limit) / estimate.std_error
    checks.append(_check("mixed-prior/significance-probability-limit", z, z_threshold))

    desk_n = CurveTest(curve, 10**4)
    nonsig = posterior_given_nonsignificance(mixed, curve, desk_n.n)
    hist = estimate_conditional_histogram(
        mixed, desk_n, SignificanceEvent.NON_SIGNIFICANT, plan
    )
    atom_fraction = hist.atom_draws / hist.conditioning_draws
    atom_se = math.sqrt(
        nonsig.mass_at_zero * (1.0 - nonsig.mass_at_zero) / hist.conditioning_draws
    )
    z = abs(atom_fraction - nonsig.mass_at_zero) / atom_se
    checks.append(_check("mixed-prior/nonsignificant-atom-mass", z, z_threshold))

    # Split-sample consistency: the first half of the stream is exactly the
    # half-size plan, so the two halves can be compared without new draws.
    half = plan.draws // 2
    if half >= 1:
        half_plan = SimulationPlan(
            draws=half, seed=seed, bins=bins, range=plan.range
        )
        full = estimate_event_probability(
            prior, design, SignificanceEvent.SIGNIFICANT, plan
        )
        first = estimate_event_probability(
            prior, design, SignificanceEvent.SIGNIFICANT, half_plan
        )
        hits_full = round(full.value * full.draws_used)
        hits_first = round(first.value * first.draws_used)
        rest_draws = plan.draws - half
        p_rest = (hits_full - hits_first) / rest_draws
        se_rest = math.sqrt(max(p_rest * (1.0 - p_rest), 1e-300) / rest_draws)
        gap = abs(first.value - p_rest)
        combined = math.sqrt(first.std_error**2 + se_rest**2)
        checks.append(_check("split-sample/significant", gap / combined, 6.0))

    lines = [
        "sigpost verify report",
        f"version={__version__} draws={draws} seed={seed} bins={bins} "
        f"z_threshold={_fmt(z_threshold)}",
    ]
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        lines.append(
            f"check {check.name} statistic={_fmt(check.statistic)} "
            f"threshold={_fmt(check.threshold)} {status}"
        )
    passed = sum(check.passed for check in checks)
    lines.append(f"result: {'PASS' if passed == len(checks) else 'FAIL'} "
                 f"({passed}/{len(checks)} checks)")
    failures = [check.name for check in checks if not check.passed]
    if failures:
        lines.append("failures-json: " + json.dumps(failures))
    return "\n".join(lines) + "\n", checks


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(_positive_int(part) for part in text.split(","))


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(","))


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--points", type=_positive_int, default=1001)
    parser.add_argument("--theta-lo", type=float, default=None)
    parser.add_argument("--theta-hi", type=float, default=None)


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="-", help="output CSV path ('-' = stdout)")
    parser.add_argument("--svg", default=None, help="optional SVG plot path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigpost",
        description="posteriors conditional on significance-test outcomes",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p1 = sub.add_parser("figure1", help="prior and two-way posteriors")
    p1.add_argument("--mu", type=float, default=1.0)
    p1.add_argument("--sigma", type=_positive_float, default=1.0)
    p1.add_argument("--n", type=_positive_int, default=10)
    p1.add_argument("--c", type=_positive_float, default=1.96)
    _add_grid_flags(p1)
    _add_output_flags(p1)

    p2 = sub.add_parser("figure2", help="significance posterior across sample sizes")
    p2.add_argument("--mu", type=float, default=1.0)
    p2.add_argument("--sigma", type=_positive_float, default=1.0)
    p2.add_argument("--c", type=_positive_float, default=1.96)
    p2.add_argument("--n-list", type=_int_list, default=(10, 100, 1000, 10000))
    _add_grid_flags(p2)
    _add_output_flags(p2)

    p3 = sub.add_parser("figure3", help="limiting density ratio vs q")
    p3.add_argument("--alpha-list", type=_float_list, default=(0.05, 0.005))
    p3.add_argument("--q-step", type=_positive_float, default=0.005)
    _add_output_flags(p3)

    p4 = sub.add_parser("figure4", help="interval-null posteriors")
    p4.add_argument("--mu", type=float, default=1.0)
    p4.add_argument("--sigma", type=_positive_float, default=1.0)
    p4.add_argument("--alpha", type=_positive_float, default=0.05)
    p4.add_argument("--n", type=_positive_int, default=10000)
    p4.add_argument("--delta-list", type=_float_list, default=(0.5, 1.0, 2.0))
    p4.add_argument("--points", type=_positive_int, default=1001)
    p4.add_argument("--theta-lo", type=float, default=-4.0)
    p4.add_argument("--theta-hi", type=float, default=4.0)
    _add_output_flags(p4)

    p5 = sub.add_parser("figure5", help="sign-refined posteriors")
    p5.add_argument("--mu", type=float, default=1.0)
    p5.add_argument("--sigma", type=_positive_float, default=1.0)
    p5.add_argument("--n", type=_positive_int, default=10)
    p5.add_argument("--c", type=_positive_float, default=1.96)
    _add_grid_flags(p5)
    _add_output_flags(p5)

    pp = sub.add_parser("posterior", help="one conditional posterior on a grid")
    pp.add_argument("--mu", type=float, required=True)
    pp.add_argument("--sigma", type=_positive_float, required=True)
    pp.add_argument("--n", type=_positive_int, required=True)
    pp.add_argument("--event", choices=sorted(_EVENT_BY_NAME), required=True)
    pp.add_argument("--null", choices=("point", "interval"), default="point")
    pp.add_argument("--c", type=_positive_float, default=1.96)
    pp.add_argument("--alpha", type=_positive_float, default=0.05)
    pp.add_argument("--delta", type=_positive_float, default=1.0)
    _add_grid_flags(pp)
    _add_output_flags(pp)

    pv = sub.add_parser("verify", help="analytic-vs-oracle check suite")
    pv.add_argument("--draws", type=_positive_int, default=1_000_000)
    pv.add_argument("--seed", type=_positive_int, default=42)
    pv.add_argument("--bins", type=_positive_int, default=50)
    pv.add_argument("--z-threshold", type=_positive_float, default=4.0)
    pv.add_argument("--out", default="-")

    return parser


def _dispatch_table(args: argparse.Namespace) -> CurveTable:
    if args.command == "figure1":
        return figure1_table(
            args.mu, args.sigma, args.n, args.c, args.points,
            args.theta_lo, args.theta_hi,
        )
    if args.command == "figure2":
        return figure2_table(
            args.mu, args.sigma, args.c, args.n_list, args.points,
            args.theta_lo, args.theta_hi,
        )
    if args.command == "figure3":
        return figure3_table(args.alpha_list, args.q_step)
    if args.command == "figure4":
        return figure4_table(
            args.mu, args.sigma, args.alpha, args.n, args.delta_list,
            args.points, args.theta_lo, args.theta_hi,
        )
    if args.command == "figure5":
        return figure5_table(
            args.mu, args.sigma, args.n, args.c, args.points,
            args.theta_lo, args.theta_hi,
        )
    if args.command == "posterior":
        return posterior_table(
            args.mu, args.sigma, args.n, _EVENT_BY_NAME[args.event],
            null=args.null, c=args.c, alpha=args.alpha, delta=args.delta,
            points=args.points, lo=args.theta_lo, hi=args.theta_hi,
        )
    raise ValueError(f"unknown command {args.command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            report, checks = run_verification(
                draws=args.draws, seed=args.seed,
                z_threshold=args.z_threshold, bins=args.bins,
            )
            if args.out in (None, "-"):
                sys.stdout.write(report)
            else:
                with open(args.out, "w", encoding="utf-8") as handle:
                    handle.write(report)
            return 0 if all(check.passed for check in checks) else 1
        table = _dispatch_table(args)
        table.write(args.out)
        if getattr(args, "svg", None):
            _render_svg(table, args.svg)
        return 0
    except (SigpostError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
