"""Monte Carlo engine and statistical reductions."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import wignerlab as wl
from wignerlab.errors import CapacityError
from wignerlab.harness import ESD_EDGES, _center, records_for, replica_seed

from conftest import MASTER_SEED


def small_config(**overrides):
    base = dict(
        ensemble="gaussian",
        dimensions=(12, 16),
        replicas=8,
        seed=MASTER_SEED,
        functions=(wl.FunctionSpec(name="sq", coeffs=(0.0, 0.0, 1.0)),),
        powers=(2,),
        edge_times=(1.0,),
        edge_count=2,
    )
    base.update(overrides)
    return wl.ExperimentConfig(**base)


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def test_config_validation_messages():
    with pytest.raises(ValueError, match="replicas"):
        small_config(replicas=1)
    with pytest.raises(ValueError, match="edge_times"):
        small_config(edge_times=(-1.0,))
    with pytest.raises(ValueError, match="powers"):
        small_config(powers=(0,))
    with pytest.raises(ValueError, match="seed"):
        small_config(seed=-1)
    with pytest.raises(ValueError, match="unknown distribution"):
        small_config(ensemble="levy")
    with pytest.raises(ValueError, match="dimensions"):
        small_config(dimensions=())
    with pytest.raises(ValueError, match="edge_count"):
        small_config(edge_count=0)
    with pytest.raises(ValueError, match="unique"):
        small_config(
            functions=(
                wl.FunctionSpec(name="g", coeffs=(1.0,)),
                wl.FunctionSpec(name="g", coeffs=(0.0, 1.0)),
            )
        )


def test_function_spec_validation():
    with pytest.raises(ValueError, match="exactly one"):
        wl.FunctionSpec(name="bad", coeffs=(1.0,), analytic="exp")
    with pytest.raises(ValueError, match="exactly one"):
        wl.FunctionSpec(name="bad")
    with pytest.raises(ValueError, match="orders"):
        wl.FunctionSpec(name="bad", analytic="exp", orders=(-1,))


def test_config_digest_stable_and_sensitive():
    a, b = small_config(), small_config()
    assert a.digest() == b.digest()
    assert a.digest() != small_config(seed=MASTER_SEED + 1).digest()


# ---------------------------------------------------------------------------
# engine determinism
# ---------------------------------------------------------------------------

def test_replica_seeds_distinct_and_stable():
    seeds = {replica_seed(MASTER_SEED, n, r) for n in (10, 20, 30) for r in range(50)}
    assert len(seeds) == 150
    assert replica_seed(MASTER_SEED, 10, 3) == replica_seed(MASTER_SEED, 10, 3)


def test_run_monte_carlo_deterministic_across_workers():
    config = small_config()
    records_seq = wl.run_monte_carlo(config, workers=1)
    records_par = wl.run_monte_carlo(config, workers=2)
    assert [r.to_json() for r in records_seq] == [r.to_json() for r in records_par]


def test_record_contents():
    config = small_config()
    records = wl.run_monte_carlo(config)
    assert len(records) == 16
    first = records[0]
    assert first.n == 12 and first.replica == 0
    assert first.ensemble == "gaussian"
    assert len(first.eig_digest) == 64
    assert set(first.lss) == {"sq"}
    k = wl.edge_trace_exponent(12, 1.0)
    assert set(first.trace_powers) == {"2", str(k), str(2 * k), str(2 * k + 1)}
    assert len(first.edge) == 2
    assert first.edge[0] >= first.edge[1]
    assert len(first.esd_cum) == len(ESD_EDGES)
    assert list(first.esd_cum) == sorted(first.esd_cum)
    # Tr W^2 recomputable from lss of x^2
    assert first.lss["sq"] == first.trace_powers["2"]
    parsed = json.loads(first.to_json())
    assert parsed["kind"] == "record" and parsed["n"] == 12


def test_record_order_is_grid_then_replica():
    records = wl.run_monte_carlo(small_config())
    assert [(r.n, r.replica) for r in records] == [
        (n, r) for n in (12, 16) for r in range(8)
    ]
    assert records_for(records, 16)[0].replica == 0


def test_work_budget_enforced():
    with pytest.raises(CapacityError, match="budget"):
        wl.run_monte_carlo(small_config(), budget=10)


def test_edge_count_must_fit_smallest_dimension():
    with pytest.raises(ValueError, match="edge_count"):
        wl.run_monte_carlo(small_config(edge_count=13))


# ---------------------------------------------------------------------------
# centering
# ---------------------------------------------------------------------------

@given(
    st.lists(st.integers(min_value=0, max_value=2**20 - 1), min_size=2, max_size=50),
    st.sampled_from([1.0, 2.0, 0.5, 8.0, -4.0]),
)
def test_center_exactly_shift_invariant(mantissas, shift):
    # values with <= 20 mantissa bits shift exactly under these constants
    samples = np.array(mantissas, dtype=np.float64) / 2**20
    shifted = samples + shift
    assert np.array_equal(_center(shifted), _center(samples))


def test_center_removes_mean():
    samples = np.array([1.5, 2.5, 3.0, -1.0])
    assert abs(_center(samples).mean()) < 1e-15


# ---------------------------------------------------------------------------
# factorization estimator
# ---------------------------------------------------------------------------

def test_factorization_requires_enough_homogeneous_records():
    records = wl.run_monte_carlo(small_config())
    with pytest.raises(ValueError, match="100 records"):
        wl.estimate_joint_factorization(records_for(records, 12), (2,), (1.0,))
    config = small_config(dimensions=(8, 10), replicas=60)
    mixed = wl.run_monte_carlo(config, workers=2)
    with pytest.raises(ValueError, match="one dimension"):
        wl.estimate_joint_factorization(mixed, (2,), (1.0,))


@pytest.fixture(scope="module")
def tiny_records():
    config = wl.ExperimentConfig(
        ensemble="gaussian",
        dimensions=(4,),
        replicas=400,
        seed=MASTER_SEED,
        powers=(2,),
        edge_times=(1.0,),
    )
    return wl.run_monte_carlo(config, workers=2)


def test_factorization_empty_edge_group_gap_is_zero(tiny_records):
    result = wl.estimate_joint_factorization(tiny_records, (2,), (), centering="empirical")
    assert result.gap == 0.0
    assert result.joint == result.product


def test_factorization_exact_centering_at_tiny_n(tiny_records):
    result = wl.estimate_joint_factorization(tiny_records, (2,), (1.0,))
    assert result.centering == "exact"
    assert result.edge_exponents == (2,)
    forced = wl.estimate_joint_factorization(tiny_records, (2,), (1.0,), centering="empirical")
    assert forced.centering == "empirical"
    # both estimates target the same quantity
    assert abs(result.gap - forced.gap) <= 4 * (result.stderr + forced.stderr)


def test_factorization_split_halves_consistency(gaussian_records_n400):
    full = wl.estimate_joint_factorization(gaussian_records_n400, (2,), (1.0,), seed=1)
    half_a = wl.estimate_joint_factorization(gaussian_records_n400[:1000], (2,), (1.0,), seed=2)
    half_b = wl.estimate_joint_factorization(gaussian_records_n400[1000:], (2,), (1.0,), seed=3)
    mixed_gap = half_a.joint - half_b.product
    combined = math.hypot(half_a.stderr, half_b.stderr)
    assert abs(mixed_gap - full.gap) <= 3 * (combined + full.stderr)


def test_factorization_invariant_to_exact_shift(tiny_records):
    # quantize to 30 mantissa bits so adding 4.0 is exact per element
    def quantized(records, shift):
        out = []
        for r in records:
            powers = {
                k: math.floor(v * 2**30) / 2**30 + shift for k, v in r.trace_powers.items()
            }
            out.append(
                wl.RunRecord(
                    n=r.n, replica=r.replica, seed=r.seed, ensemble=r.ensemble,
                    eig_digest=r.eig_digest, lss=r.lss, lss_truncated=r.lss_truncated,
                    trace_powers=powers, edge=r.edge, esd_cum=r.esd_cum,
                )
            )
        return out

    base = wl.estimate_joint_factorization(quantized(tiny_records, 0.0), (2,), (1.0,), centering="empirical")
    moved = wl.estimate_joint_factorization(quantized(tiny_records, 4.0), (2,), (1.0,), centering="empirical")
    assert moved.joint == base.joint
    assert moved.gap == base.gap


# ---------------------------------------------------------------------------
# independence test
# ---------------------------------------------------------------------------

def test_independence_perfect_dependence():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(300)
    result = wl.independence_test(x, x, permutations=500, seed=0)
    assert result.pearson == pytest.approx(1.0, abs=1e-12)
    assert result.dcor == pytest.approx(1.0, abs=1e-9)
    assert result.p_value <= 1 / 501


def test_independence_input_validation():
    x = np.zeros(100)
    with pytest.raises(ValueError, match="equal-length"):
        wl.independence_test(x, np.zeros(99))
    with pytest.raises(ValueError, match="at least 100"):
        wl.independence_test(np.zeros(50), np.zeros(50))


def test_independence_deterministic():
    rng = np.random.default_rng(5)
    x, y = rng.standard_normal(150), rng.standard_normal(150)
    a = wl.independence_test(x, y, permutations=99, seed=11)
    b = wl.independence_test(x, y, permutations=99, seed=11)
    assert (a.pearson, a.dcor, a.p_value) == (b.pearson, b.dcor, b.p_value)


def test_null_pearson_concentration():
    # independent normals, length 2000: |pearson| <= 3/sqrt(2000) in >= 99% of reruns
    inside = 0
    trials = 200
    bound = 3 / math.sqrt(2000)
    rng = np.random.default_rng(MASTER_SEED)
    for _ in range(trials):
        x = rng.standard_normal(2000)
        y = rng.standard_normal(2000)
        if abs(float(np.corrcoef(x, y)[0, 1])) <= bound:
            inside += 1
    assert inside >= 0.99 * trials


def test_null_pvalues_uniform():
    # fraction of p-values below 0.05 is 0.05 +- 0.02 under a true null
    trials = 1000
    below = 0
    rng = np.random.default_rng(MASTER_SEED + 1)
    for trial in range(trials):
        x = rng.standard_normal(100)
        y = rng.standard_normal(100)
        result = wl.independence_test(x, y, permutations=199, seed=trial)
        if result.p_value < 0.05:
            below += 1
    assert 0.03 <= below / trials <= 0.07


# ---------------------------------------------------------------------------
# gaussianity check
# ---------------------------------------------------------------------------

def test_gaussianity_on_exact_normal_sample():
    rng = np.random.default_rng(MASTER_SEED + 2)
    result = wl.gaussianity_check(rng.standard_normal(5000), seed=0)
    assert abs(result.skewness[0]) <= 0.15
    assert abs(result.excess_kurtosis[0]) <= 0.3
    assert result.wick_gap <= 4 * result.wick_stderr


def test_gaussianity_vector_input():
    rng = np.random.default_rng(MASTER_SEED + 3)
    z = rng.multivariate_normal([0, 0], [[1.0, 0.4], [0.4, 0.5]], size=3000)
    result = wl.gaussianity_check(z, seed=0)
    assert len(result.skewness) == 2
    assert result.wick_gap <= 4 * result.wick_stderr


def test_gaussianity_detects_non_gaussian():
    rng = np.random.default_rng(MASTER_SEED + 4)
    heavy = rng.standard_normal(5000) ** 3
    result = wl.gaussianity_check(heavy, seed=0)
    assert abs(result.excess_kurtosis[0]) > 0.3


def test_gaussianity_rejects_degenerate_input():
    with pytest.raises(ValueError, match="at least 500"):
        wl.gaussianity_check(np.zeros(100))
    with pytest.raises(ValueError, match="variance"):
        wl.gaussianity_check(np.ones(600))


# ---------------------------------------------------------------------------
# scans and comparisons
# ---------------------------------------------------------------------------

def test_truncation_scan_polynomial_is_exact():
    g = wl.FunctionSpec(name="cubic", coeffs=(0.5, 0.0, -1.0, 2.0))
    points = wl.truncation_variance_scan(g, (3, 5), 16, 50, seed=MASTER_SEED)
    assert all(p.variance == 0.0 for p in points)


def test_truncation_scan_orders_recorded():
    g = wl.FunctionSpec(name="exp", analytic="exp")
    points = wl.truncation_variance_scan(g, (2, 6), 16, 40, seed=MASTER_SEED)
    assert [p.order for p in points] == [2, 6]
    assert points[1].variance <= points[0].variance


def test_edge_boundedness_scan_shape():
    rows = wl.edge_boundedness_scan(1.0, (12, 16), 30, seed=MASTER_SEED, workers=2)
    assert [row.n for row in rows] == [12, 16]
    for row in rows:
        assert row.exponent == wl.edge_trace_exponent(row.n, 1.0)
        assert row.even_mean > 0
        assert row.even_stderr > 0


def test_ks_two_sample_basics():
    a = np.array([0.0, 1.0])
    assert wl.ks_two_sample(a, a) == 0.0
    assert wl.ks_two_sample(np.array([0.0, 1.0]), np.array([0.5, 0.6])) == pytest.approx(0.5)
    assert wl.ks_two_sample(np.zeros(4), np.ones(4)) == 1.0


def test_ks_null_quantile():
    # two-sample KS at N=M=2000 stays below 0.08 in >= 95% of seeded reruns
    rng = np.random.default_rng(MASTER_SEED + 5)
    trials = 200
    below = sum(
        wl.ks_two_sample(rng.standard_normal(2000), rng.standard_normal(2000)) <= 0.08
        for _ in range(trials)
    )
    assert below >= 0.95 * trials


def test_edge_compare_same_ensemble_same_seed_is_zero():
    ks = wl.edge_distribution_compare("gaussian", "gaussian", 16, 500, seed=MASTER_SEED)
    assert ks == 0.0


def test_edge_compare_same_ensemble_different_seeds():
    config_a = wl.ExperimentConfig(
        ensemble="gaussian", dimensions=(200,), replicas=500, seed=MASTER_SEED
    )
    config_b = wl.ExperimentConfig(
        ensemble="gaussian", dimensions=(200,), replicas=500, seed=MASTER_SEED + 17
    )
    s1_a = np.array([r.edge[0] for r in wl.run_monte_carlo(config_a, workers=2)])
    s1_b = np.array([r.edge[0] for r in wl.run_monte_carlo(config_b, workers=2)])
    assert wl.ks_two_sample(s1_a, s1_b) <= 0.08


def test_edge_compare_requires_enough_replicas():
    with pytest.raises(ValueError, match="500"):
        wl.edge_distribution_compare("gaussian", "rademacher", 16, 100, seed=1)


def test_pooled_esd_ks_small_run():
    config = wl.ExperimentConfig(
        ensemble="gaussian", dimensions=(40,), replicas=50, seed=MASTER_SEED
    )
    assert wl.pooled_esd_ks(wl.run_monte_carlo(config)) <= 0.05
