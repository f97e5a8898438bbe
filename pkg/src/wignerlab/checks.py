"""Named statistical checks an experiment config can enable.

Each check reduces run records to summary rows (check, n, statistic, value,
tolerance, stderr, pass).  Tolerances follow the same recipes as the test
suite: fixed finite-size slack plus multiples of the estimated standard
error, since the underlying limit statements carry no rates.  Rows whose
statistic is a p-value pass when the value exceeds the tolerance; all other
rows pass when the value stays at or below it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .harness import (
    ExperimentConfig,
    RunRecord,
    _center,
    estimate_joint_factorization,
    gaussianity_check,
    independence_test,
    ks_two_sample,
    pooled_esd_ks,
    records_for,
    run_monte_carlo,
)
from .rng import derive_key, tag64
from .spectral import edge_trace_exponent

SEMICIRCLE_KS_TOLERANCE = 0.05
PEARSON_TOLERANCE = 0.1
P_VALUE_FLOOR = 0.01
FACTORIZATION_SLACK = 0.1
EDGE_BAND_RATIO = 3.0
UNIVERSALITY_KS_TOLERANCE = 0.1


@dataclass(frozen=True)
class SummaryRow:
    check: str
    n: Optional[int]
    statistic: str
    value: float
    tolerance: float
    stderr: Optional[float]
    passed: bool


def _row(check, n, statistic, value, tolerance, stderr=None, higher_is_pass=False):
    passed = value > tolerance if higher_is_pass else value <= tolerance
    return SummaryRow(
        check=check,
        n=n,
        statistic=statistic,
        value=float(value),
        tolerance=float(tolerance),
        stderr=None if stderr is None else float(stderr),
        passed=bool(passed),
    )


def _check_seed(config: ExperimentConfig, label: str, n: int) -> int:
    return derive_key(tag64(f"wignerlab.check.{label}"), config.seed, n)


def check_semicircle(config, records, workers=1) -> list[SummaryRow]:
    rows = []
    for n in config.dimensions:
        ks = pooled_esd_ks(records_for(records, n))
        rows.append(_row("semicircle", n, "pooled_esd_ks", ks, SEMICIRCLE_KS_TOLERANCE))
    return rows


def check_trace_mean(config, records, workers=1) -> list[SummaryRow]:
    if 2 not in config.powers:
        raise ValueError("checks: 'trace_mean' needs 2 in powers")
    rows = []
    for n in config.dimensions:
        samples = np.array([r.trace_powers["2"] for r in records_for(records, n)])
        stderr = float(np.std(samples, ddof=1) / math.sqrt(len(samples)))
        err = abs(float(np.mean(samples)) - n / 4.0)
        rows.append(_row("trace_mean", n, "abs_error_vs_quarter_n", err, 5.0 * stderr, stderr))
    return rows


def check_gaussianity(config, records, workers=1) -> list[SummaryRow]:
    if not config.powers:
        raise ValueError("checks: 'gaussianity' needs at least one entry in powers")
    rows = []
    for n in config.dimensions:
        subset = records_for(records, n)
        count = len(subset)
        matrix = np.column_stack(
            [[r.trace_powers[str(m)] for r in subset] for m in config.powers]
        )
        result = gaussianity_check(matrix, seed=_check_seed(config, "gaussianity", n))
        tol_skew = max(0.15, 4.0 * math.sqrt(6.0 / count))
        tol_kurt = max(0.3, 4.0 * math.sqrt(24.0 / count))
        for m, skew, kurt in zip(config.powers, result.skewness, result.excess_kurtosis):
            rows.append(_row("gaussianity", n, f"abs_skewness_m{m}", abs(skew), tol_skew))
            rows.append(_row("gaussianity", n, f"abs_excess_kurtosis_m{m}", abs(kurt), tol_kurt))
        rows.append(
            _row(
                "gaussianity", n, "wick_gap",
                result.wick_gap, 4.0 * result.wick_stderr, result.wick_stderr,
            )
        )
    return rows


def check_independence(config, records, workers=1) -> list[SummaryRow]:
    if not config.functions:
        raise ValueError("checks: 'independence' needs at least one test function")
    rows = []
    for n in config.dimensions:
        subset = records_for(records, n)
        s1 = np.array([r.edge[0] for r in subset])
        for spec in config.functions:
            x = _center(np.array([r.lss[spec.name] for r in subset]))
            result = independence_test(
                x, s1, seed=derive_key(_check_seed(config, "independence", n), tag64(spec.name))
            )
            rows.append(
                _row(
                    "independence", n, f"abs_pearson_{spec.name}",
                    abs(result.pearson), PEARSON_TOLERANCE,
                )
            )
            rows.append(
                _row(
                    "independence", n, f"dcor_pvalue_{spec.name}",
                    result.p_value, P_VALUE_FLOOR, higher_is_pass=True,
                )
            )
    return rows


def check_factorization(config, records, workers=1) -> list[SummaryRow]:
    if not config.powers or not config.edge_times:
        raise ValueError("checks: 'factorization' needs powers and edge_times")
    rows = []
    for n in config.dimensions:
        result = estimate_joint_factorization(
            records_for(records, n),
            config.powers,
            config.edge_times,
            seed=_check_seed(config, "factorization", n),
        )
        tolerance = max(FACTORIZATION_SLACK, 4.0 * result.stderr)
        rows.append(
            _row("factorization", n, "abs_gap", abs(result.gap), tolerance, result.stderr)
        )
    return rows


def check_truncation(config, records, workers=1) -> list[SummaryRow]:
    specs = [spec for spec in config.functions if len(spec.orders) >= 2]
    if not specs:
        raise ValueError("checks: 'truncation' needs a function with at least two orders")
    rows = []
    for n in config.dimensions:
        subset = records_for(records, n)
        for spec in specs:
            variances = []
            for order in spec.orders:
                diffs = np.array(
                    [r.lss[spec.name] - r.lss_truncated[spec.name][str(order)] for r in subset]
                )
                var = float(np.var(diffs, ddof=1))
                # Bootstrap-free SE of a variance: sqrt((m4 - var^2)/N).
                centered = _center(diffs)
                m4 = float(np.mean(centered**4))
                se = math.sqrt(max(m4 - var**2, 0.0) / len(diffs))
                variances.append((order, var, se))
                rows.append(_row("truncation", n, f"variance_{spec.name}@{order}", var, math.inf, se))
            for (o1, v1, s1), (o2, v2, s2) in zip(variances, variances[1:]):
                rows.append(
                    _row(
                        "truncation", n, f"increase_{spec.name}@{o1}to{o2}",
                        v2 - v1, 2.0 * math.hypot(s1, s2),
                    )
                )
    return rows


def check_edge_boundedness(config, records, workers=1) -> list[SummaryRow]:
    if not config.edge_times:
        raise ValueError("checks: 'edge_boundedness' needs edge_times")
    if len(config.dimensions) < 2:
        raise ValueError("checks: 'edge_boundedness' needs at least two dimensions")
    rows = []
    for t in config.edge_times:
        stats = []
        for n in config.dimensions:
            subset = records_for(records, n)
            k = edge_trace_exponent(n, t)
            even = np.array([r.trace_powers[str(2 * k)] for r in subset])
            odd = np.array([r.trace_powers[str(2 * k + 1)] for r in subset])
            stats.append(
                (
                    n,
                    float(np.mean(even)),
                    float(np.std(even, ddof=1) / math.sqrt(len(even))),
                    float(np.mean(odd)),
                    float(np.std(odd, ddof=1) / math.sqrt(len(odd))),
                )
            )
            rows.append(_row("edge_boundedness", n, f"even_trace_mean_t{t}", stats[-1][1], math.inf, stats[-1][2]))
            rows.append(_row("edge_boundedness", n, f"abs_odd_trace_mean_t{t}", abs(stats[-1][3]), math.inf, stats[-1][4]))
        means = [s[1] for s in stats]
        rows.append(_row("edge_boundedness", None, f"even_band_ratio_t{t}", max(means) / min(means), EDGE_BAND_RATIO))
        first, last = stats[0], stats[-1]
        rows.append(
            _row(
                "edge_boundedness", None, f"odd_decay_t{t}",
                abs(last[3]) - abs(first[3]), 2.0 * math.hypot(first[4], last[4]),
            )
        )
    return rows


def check_edge_universality(config, records, workers=1) -> list[SummaryRow]:
    if config.compare_ensemble is None:
        raise ValueError("checks: 'edge_universality' needs compare_ensemble")
    other = run_monte_carlo(config.with_ensemble(config.compare_ensemble), workers=workers)
    rows = []
    for n in config.dimensions:
        s1_a = np.array([r.edge[0] for r in records_for(records, n)])
        s1_b = np.array([r.edge[0] for r in records_for(other, n)])
        rows.append(
            _row(
                "edge_universality", n,
                f"s1_ks_{config.ensemble}_vs_{config.compare_ensemble}",
                ks_two_sample(s1_a, s1_b), UNIVERSALITY_KS_TOLERANCE,
            )
        )
    return rows


CHECKS: dict[str, Callable] = {
    "semicircle": check_semicircle,
    "trace_mean": check_trace_mean,
    "gaussianity": check_gaussianity,
    "independence": check_independence,
    "factorization": check_factorization,
    "truncation": check_truncation,
    "edge_boundedness": check_edge_boundedness,
    "edge_universality": check_edge_universality,
}


def validate_check_requirements(config: ExperimentConfig) -> None:
    """Fail fast (before any sampling) when a check's config inputs are missing."""
    for name in config.checks:
        if name not in CHECKS:
            raise ValueError(f"checks: unknown check {name!r} (known: {sorted(CHECKS)})")
    if "trace_mean" in config.checks and 2 not in config.powers:
        raise ValueError("checks: 'trace_mean' needs 2 in powers")
    if "gaussianity" in config.checks and not config.powers:
        raise ValueError("checks: 'gaussianity' needs at least one entry in powers")
    if "independence" in config.checks and not config.functions:
        raise ValueError("checks: 'independence' needs at least one test function")
    if "factorization" in config.checks and (not config.powers or not config.edge_times):
        raise ValueError("checks: 'factorization' needs powers and edge_times")
    if "truncation" in config.checks and not any(len(s.orders) >= 2 for s in config.functions):
        raise ValueError("checks: 'truncation' needs a function with at least two orders")
    if "edge_boundedness" in config.checks:
        if not config.edge_times:
            raise ValueError("checks: 'edge_boundedness' needs edge_times")
        if len(config.dimensions) < 2:
            raise ValueError("checks: 'edge_boundedness' needs at least two dimensions")
    if "edge_universality" in config.checks and config.compare_ensemble is None:
        raise ValueError("checks: 'edge_universality' needs compare_ensemble")


def run_checks(
    config: ExperimentConfig, records: Sequence[RunRecord], workers: int = 1
) -> list[SummaryRow]:
    rows: list[SummaryRow] = []
    for name in config.checks:
        rows.extend(CHECKS[name](config, records, workers=workers))
    return rows
