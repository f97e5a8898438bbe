"""Entry distributions, matrix sampling, and the semicircle helpers."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

import wignerlab as wl
from wignerlab.rng import CounterStream, derive_key, tag64

ALL_NAMES = ("gaussian", "rademacher", "uniform")


# ---------------------------------------------------------------------------
# exact moment tables
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("name", ALL_NAMES)
def test_normalization_moments(name):
    dist = wl.get_distribution(name)
    assert dist.moment(0) == 1
    assert dist.moment(1) == 0
    assert dist.moment(2) == Fraction(1, 4)


@pytest.mark.parametrize("name", ALL_NAMES)
def test_odd_moments_vanish(name):
    dist = wl.get_distribution(name)
    assert all(dist.moment(p) == 0 for p in range(1, 17, 2))


@pytest.mark.parametrize("name", ALL_NAMES)
def test_subgaussian_growth_bound(name):
    dist = wl.get_distribution(name)
    c = Fraction(dist.subgaussian_constant)
    for k in range(1, 9):
        assert dist.moment(2 * k) <= (c * k) ** k


def test_gaussian_moments_match_quadrature_oracle():
    # oracle: numerical integration of x^p against the N(0, 1/4) density
    sigma = 0.5
    for p in range(0, 13):
        oracle, err = integrate.quad(
            lambda x, p=p: x**p * math.exp(-(x**2) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi)),
            -10 * sigma,
            10 * sigma,
        )
        assert abs(float(wl.get_distribution("gaussian").moment(p)) - oracle) < 1e-10 + 10 * err


def test_uniform_moments_match_quadrature_oracle():
    a = math.sqrt(3) / 2
    for p in range(0, 13):
        oracle, _ = integrate.quad(lambda x, p=p: x**p / (2 * a), -a, a)
        assert abs(float(wl.get_distribution("uniform").moment(p)) - oracle) < 1e-12


@pytest.mark.parametrize("name", ALL_NAMES)
def test_moments_match_monte_carlo(name):
    # table moment(2k) vs the mean of 10^6 draws, within 5 standard errors
    dist = wl.get_distribution(name)
    stream = CounterStream(derive_key(tag64("moment-mc"), tag64(name)))
    draws = dist.sample_block(stream, 1_000_000)
    for k in range(1, 7):
        powers = draws ** (2 * k)
        se = powers.std(ddof=1) / math.sqrt(len(powers))
        tol = 5 * se if se > 0 else 1e-12
        assert abs(powers.mean() - float(dist.moment(2 * k))) <= tol


@pytest.mark.parametrize("name", ALL_NAMES)
def test_empirical_mean_and_variance(name):
    # mean 0 is known, so the second moment is the variance estimator here;
    # its standard error is exactly zero for the two-point law
    dist = wl.get_distribution(name)
    stream = CounterStream(derive_key(tag64("mean-var-mc"), tag64(name)))
    draws = dist.sample_block(stream, 100_000)
    se_mean = draws.std(ddof=1) / math.sqrt(len(draws))
    assert abs(draws.mean()) <= 5 * se_mean
    squares = draws**2
    se_var = squares.std(ddof=1) / math.sqrt(len(squares))
    assert abs(squares.mean() - 0.25) <= 5 * se_var


def test_scalar_sample_matches_block():
    dist = wl.get_distribution("gaussian")
    s1 = CounterStream(123)
    singles = [dist.sample(s1) for _ in range(8)]
    s2 = CounterStream(123)
    assert np.allclose(singles, dist.sample_block(s2, 8), rtol=0, atol=0)


def test_unknown_distribution_rejected():
    with pytest.raises(ValueError, match="unknown distribution"):
        wl.get_distribution("cauchy")


# ---------------------------------------------------------------------------
# matrix sampling
# ---------------------------------------------------------------------------

def test_sample_is_symmetric_bit_exact():
    sample = wl.sample_wigner(37, wl.get_distribution("uniform"), seed=5)
    assert np.array_equal(sample.entries, sample.entries.T)


def test_sample_deterministic_reruns():
    dist = wl.get_distribution("gaussian")
    a = wl.sample_wigner(20, dist, seed=99)
    b = wl.sample_wigner(20, dist, seed=99)
    assert a.entries.tobytes() == b.entries.tobytes()
    c = wl.sample_wigner(20, dist, seed=100)
    assert a.entries.tobytes() != c.entries.tobytes()


def test_one_by_one_matrix_is_raw_draw():
    # sqrt(1) scaling: the single entry is the unscaled diagonal draw
    dist = wl.get_distribution("gaussian")
    sample = wl.sample_wigner(1, dist, seed=7)
    assert sample.entries.shape == (1, 1)
    resample = wl.sample_wigner(1, dist, seed=7)
    assert sample.entries[0, 0] == resample.entries[0, 0]
    assert sample.entries[0, 0] != 0.0


def test_rademacher_entries_take_two_values():
    n = 2
    sample = wl.sample_wigner(n, wl.get_distribution("rademacher"), seed=3)
    allowed = {0.5 / math.sqrt(n), -0.5 / math.sqrt(n)}
    assert set(np.unique(sample.entries)).issubset(allowed)


def test_entry_variance_monte_carlo():
    # Var(entry * sqrt(n)) = 1/4 across replicas, within 5 standard errors
    dist = wl.get_distribution("gaussian")
    n = 50
    draws = np.array(
        [wl.sample_wigner(n, dist, seed=s).entries[0, 1] * math.sqrt(n) for s in range(10_000)]
    )
    var = draws.var(ddof=1)
    fourth = np.mean((draws - draws.mean()) ** 4)
    se = math.sqrt(max(fourth - var**2, 0.0) / len(draws))
    assert abs(var - 0.25) <= 5 * se


def test_submatrix_agrees_across_dimensions():
    # counters depend on (i, j) only, so the shared upper-left block matches
    dist = wl.get_distribution("rademacher")
    small = wl.sample_wigner(8, dist, seed=11)
    large = wl.sample_wigner(13, dist, seed=11)
    assert np.array_equal(
        small.entries * math.sqrt(8), large.entries[:8, :8] * math.sqrt(13)
    )


def test_distinct_ensembles_distinct_matrices():
    a = wl.sample_wigner(10, wl.get_distribution("gaussian"), seed=1)
    b = wl.sample_wigner(10, wl.get_distribution("uniform"), seed=1)
    assert not np.array_equal(a.entries, b.entries)


def test_zero_dimension_rejected():
    with pytest.raises(ValueError, match="dimension"):
        wl.sample_wigner(0, wl.get_distribution("gaussian"), seed=1)


def test_distinct_diagonal_distribution():
    base = wl.get_distribution("gaussian")
    mixed = wl.EntryDistribution(
        name="gaussian",
        transform=base.transform,
        moment_fn=base.moment_fn,
        subgaussian_constant=base.subgaussian_constant,
        diagonal=wl.get_distribution("rademacher"),
    )
    n = 6
    sample = wl.sample_wigner(n, mixed, seed=21)
    diag = np.diag(sample.entries) * math.sqrt(n)
    assert set(np.unique(diag)).issubset({0.5, -0.5})
    plain = wl.sample_wigner(n, base, seed=21)
    off = ~np.eye(n, dtype=bool)
    assert np.array_equal(sample.entries[off], plain.entries[off])


# ---------------------------------------------------------------------------
# semicircle law
# ---------------------------------------------------------------------------

def test_semicircle_density_pointwise():
    assert wl.semicircle_density(0.0) == pytest.approx(2 / math.pi, abs=1e-15)
    assert wl.semicircle_density(1.0) == 0.0
    assert wl.semicircle_density(-1.0) == 0.0
    assert wl.semicircle_density(1.5) == 0.0


def test_semicircle_density_integrates_to_one():
    mass, err = integrate.quad(wl.semicircle_density, -1, 1)
    assert abs(mass - 1.0) < 1e-8


def test_semicircle_moments_match_quadrature():
    for k in range(0, 13):
        oracle, err = integrate.quad(lambda x, k=k: x**k * wl.semicircle_density(x), -1, 1)
        assert abs(float(wl.semicircle_moment(k)) - oracle) < 1e-8 + 10 * err


def test_semicircle_moment_closed_forms():
    assert wl.semicircle_moment(1) == 0
    assert wl.semicircle_moment(2) == Fraction(1, 4)
    assert wl.semicircle_moment(6) == Fraction(5, 64)


def test_semicircle_cdf_endpoints():
    assert wl.semicircle_cdf(-1.0) == pytest.approx(0.0, abs=1e-15)
    assert wl.semicircle_cdf(0.0) == pytest.approx(0.5, abs=1e-15)
    assert wl.semicircle_cdf(1.0) == pytest.approx(1.0, abs=1e-15)
    assert wl.semicircle_cdf(2.0) == 1.0
