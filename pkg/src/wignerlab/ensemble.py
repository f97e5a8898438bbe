"""Entry distributions and scaled symmetric random-matrix sampling.

All shipped distributions have mean 0 and variance 1/4, so the matrix
``(x_ij / sqrt(n))`` has its spectrum on [-1, 1] in the large-n limit
(factor-2 convention: the classical semicircle on [-2, 2] is rescaled by
half throughout this package).  Entry moments are available exactly as
``fractions.Fraction`` values, which the moment oracles rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .rng import CounterStream, counter_uniforms, derive_key, tag64

# Entries scaled so Var = 1/4; uniform support is then [-sqrt(3)/2, sqrt(3)/2].
_UNIFORM_HALF_WIDTH = math.sqrt(3.0) / 2.0


@dataclass(frozen=True)
class EntryDistribution:
    """A matrix-entry law: a deterministic sampler plus an exact moment table.

    ``transform`` maps two independent uniform [0,1) arrays to draws; every
    sampler consumes exactly two counter slots per draw so streams for
    different entries never overlap.  ``moment_fn(p)`` returns E[x^p] as an
    exact Fraction.  ``subgaussian_constant`` is the documented C with
    E[x^(2k)] <= (C*k)^k for every k >= 1.
    """

    name: str
    transform: Callable[[np.ndarray, np.ndarray], np.ndarray]
    moment_fn: Callable[[int], Fraction]
    subgaussian_constant: float
    diagonal: Optional["EntryDistribution"] = None

    def moment(self, p: int) -> Fraction:
        if p < 0:
            raise ValueError(f"moment order must be >= 0, got {p}")
        return self.moment_fn(p)

    def sample(self, stream: CounterStream) -> float:
        """One draw from a sequential counter stream."""
        u0, u1 = stream.uniform_pairs(1)
        return float(self.transform(u0, u1)[0])

    def sample_block(self, stream: CounterStream, count: int) -> np.ndarray:
        u0, u1 = stream.uniform_pairs(count)
        return self.transform(u0, u1)


def _gaussian_transform(u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
    # Box-Muller; 1-u0 keeps the log argument in (0, 1].
    radius = np.sqrt(-2.0 * np.log1p(-u0))
    return 0.5 * radius * np.cos(2.0 * np.pi * u1)


def _gaussian_moment(p: int) -> Fraction:
    if p % 2 == 1:
        return Fraction(0)
    k = p // 2
    double_factorial = 1
    for i in range(1, k + 1):
        double_factorial *= 2 * i - 1
    return Fraction(double_factorial, 4**k)


def _rademacher_transform(u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
    return np.where(u0 < 0.5, -0.5, 0.5)


def _rademacher_moment(p: int) -> Fraction:
    return Fraction(0) if p % 2 == 1 else Fraction(1, 4 ** (p // 2))


def _uniform_transform(u0: np.ndarray, u1: np.ndarray) -> np.ndarray:
    return (2.0 * u0 - 1.0) * _UNIFORM_HALF_WIDTH


def _uniform_moment(p: int) -> Fraction:
    # E[x^p] over [-a, a] with a^2 = 3/4: zero for odd p, a^p/(p+1) for even.
    if p % 2 == 1:
        return Fraction(0)
    k = p // 2
    return Fraction(3**k, 4**k * (p + 1))


GAUSSIAN = EntryDistribution(
    name="gaussian",
    transform=_gaussian_transform,
    moment_fn=_gaussian_moment,
    subgaussian_constant=0.25,
)

RADEMACHER = EntryDistribution(
    name="rademacher",
    transform=_rademacher_transform,
    moment_fn=_rademacher_moment,
    subgaussian_constant=0.25,
)

UNIFORM = EntryDistribution(
    name="uniform",
    transform=_uniform_transform,
    moment_fn=_uniform_moment,
    subgaussian_constant=0.25,
)

DISTRIBUTIONS: dict[str, EntryDistribution] = {
    d.name: d for d in (GAUSSIAN, RADEMACHER, UNIFORM)
}


def get_distribution(name: str) -> EntryDistribution:
    try:
        return DISTRIBUTIONS[name]
    except KeyError:
        known = ", ".join(sorted(DISTRIBUTIONS))
        raise ValueError(f"unknown distribution {name!r} (known: {known})") from None


@dataclass
class WignerSample:
    """One realization of the scaled symmetric matrix ``x_ij / sqrt(n)``."""

    n: int
    entries: np.ndarray
    ensemble: str
    seed: int


def _entry_key(dist_name: str, seed: int, diagonal: bool) -> int:
    label = "wignerlab.entries.diag" if diagonal else "wignerlab.entries"
    return derive_key(tag64(label), tag64(dist_name), seed)


def sample_wigner(n: int, dist: EntryDistribution, seed: int) -> WignerSample:
    """Sample the scaled symmetric matrix deterministically from (n, dist, seed).

    Entry (i, j) with i <= j is derived from the counter ``j*(j+1)/2 + i``
    (two slots per entry), so the result is independent of fill order and
    identical for any parallel schedule.  The lower triangle mirrors the
    upper one bit-exactly.  The diagonal uses ``dist.diagonal`` when set,
    otherwise the same law as the off-diagonal entries (on its own stream).
    """
    if n < 1:
        raise ValueError(f"matrix dimension must be >= 1, got {n}")

    rows, cols = np.triu_indices(n)
    tri = cols.astype(np.uint64) * (cols.astype(np.uint64) + np.uint64(1)) // np.uint64(2)
    tri += rows.astype(np.uint64)

    key = _entry_key(dist.name, seed, diagonal=False)
    slot0 = np.uint64(2) * tri
    values = dist.transform(
        counter_uniforms(key, slot0),
        counter_uniforms(key, slot0 + np.uint64(1)),
    )

    diag_dist = dist.diagonal
    if diag_dist is not None:
        on_diag = rows == cols
        diag_key = _entry_key(diag_dist.name, seed, diagonal=True)
        diag_slot0 = np.uint64(2) * tri[on_diag]
        values[on_diag] = diag_dist.transform(
            counter_uniforms(diag_key, diag_slot0),
            counter_uniforms(diag_key, diag_slot0 + np.uint64(1)),
        )

    scaled = values / math.sqrt(n)
    entries = np.zeros((n, n), dtype=np.float64)
    entries[rows, cols] = scaled
    entries[cols, rows] = scaled
    return WignerSample(n=n, entries=entries, ensemble=dist.name, seed=int(seed))


def semicircle_density(x):
    """Semicircle density (2/pi) * sqrt(1 - x^2) on [-1, 1], zero outside."""
    x = np.asarray(x, dtype=np.float64)
    inside = np.abs(x) <= 1.0
    out = np.zeros_like(x)
    out[inside] = (2.0 / np.pi) * np.sqrt(1.0 - x[inside] ** 2)
    return out if out.ndim else float(out)


def semicircle_cdf(x):
    """CDF of the semicircle law on [-1, 1]."""
    x = np.asarray(x, dtype=np.float64)
    clipped = np.clip(x, -1.0, 1.0)
    out = 0.5 + (clipped * np.sqrt(1.0 - clipped**2) + np.arcsin(clipped)) / np.pi
    return out if out.ndim else float(out)


def catalan(k: int) -> int:
    return math.comb(2 * k, k) // (k + 1)


def semicircle_moment(k: int) -> Fraction:
    """Exact k-th moment of the semicircle law: Catalan(k/2)/4^(k/2), 0 for odd k."""
    if k < 0:
        raise ValueError(f"moment order must be >= 0, got {k}")
    if k % 2 == 1:
        return Fraction(0)
    half = k // 2
    return Fraction(catalan(half), 4**half)
