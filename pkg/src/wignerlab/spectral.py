"""Eigenvalues and the spectral observables built on them.

Everything downstream (linear spectral statistics, trace powers, edge
statistics) is computed from one symmetric eigendecomposition per sample;
trace powers use eigenvalue power sums rather than matrix powers so that
exponents of order n^(2/3) stay cheap and well conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .ensemble import WignerSample, semicircle_cdf


@dataclass
class SpectralSummary:
    """Eigenvalues of one sample, sorted descending, with source tags."""

    n: int
    eigenvalues: np.ndarray  # descending
    ensemble: str = ""
    seed: Optional[int] = None

    @property
    def trace(self) -> float:
        return float(np.sum(self.eigenvalues))


def eigenvalues_sym(matrix: Union[WignerSample, np.ndarray]) -> SpectralSummary:
    """Full spectrum of a symmetric matrix, sorted descending.

    Accepts a WignerSample (tags carried over) or a plain symmetric array.
    """
    if isinstance(matrix, WignerSample):
        entries = matrix.entries
        ensemble, seed = matrix.ensemble, matrix.seed
    else:
        entries = np.asarray(matrix, dtype=np.float64)
        ensemble, seed = "", None
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {entries.shape}")
    if not np.isfinite(entries).all():
        raise ValueError("matrix contains non-finite entries")
    if not np.array_equal(entries, entries.T):
        raise ValueError("matrix is not symmetric")
    eigs = np.linalg.eigvalsh(entries)[::-1].copy()
    return SpectralSummary(n=entries.shape[0], eigenvalues=eigs, ensemble=ensemble, seed=seed)


_NAMED_FUNCTIONS: dict[str, tuple[Callable, Callable[[int], float]]] = {
    "exp": (np.exp, lambda i: float(Fraction(1, math.factorial(i)))),
    "sin": (
        np.sin,
        lambda i: 0.0 if i % 2 == 0 else (-1.0) ** ((i - 1) // 2) / math.factorial(i),
    ),
    "cos": (
        np.cos,
        lambda i: 0.0 if i % 2 == 1 else (-1.0) ** (i // 2) / math.factorial(i),
    ),
}


def named_function_keys() -> list[str]:
    return sorted(_NAMED_FUNCTIONS)


@dataclass(frozen=True)
class TestFunction:
    """A test function: explicit polynomial or named analytic series.

    Polynomials carry coefficients (g_0, ..., g_d) and evaluate by Horner.
    Named analytic functions evaluate exactly and expose their power-series
    coefficients so they can be truncated to polynomials of any order.
    """

    __test__ = False  # not a pytest class, despite the name

    name: str
    coeffs: Optional[tuple[float, ...]] = None
    analytic: Optional[str] = None
    order: Optional[int] = None
    growth: str = "polynomial"
    _fn: Optional[Callable] = field(default=None, repr=False, compare=False)
    _coeff_fn: Optional[Callable[[int], float]] = field(default=None, repr=False, compare=False)

    @classmethod
    def polynomial(cls, coeffs, name: Optional[str] = None) -> "TestFunction":
        coeffs = tuple(float(c) for c in coeffs)
        if not coeffs:
            raise ValueError("polynomial needs at least one coefficient")
        return cls(name=name or f"poly{len(coeffs) - 1}", coeffs=coeffs)

    @classmethod
    def monomial(cls, k: int) -> "TestFunction":
        if k < 0:
            raise ValueError(f"monomial power must be >= 0, got {k}")
        return cls.polynomial((0.0,) * k + (1.0,), name=f"x^{k}")

    @classmethod
    def from_name(cls, analytic: str, order: int = 16, name: Optional[str] = None) -> "TestFunction":
        if analytic not in _NAMED_FUNCTIONS:
            raise ValueError(
                f"unknown analytic function {analytic!r} (known: {named_function_keys()})"
            )
        fn, coeff_fn = _NAMED_FUNCTIONS[analytic]
        return cls(
            name=name or analytic,
            analytic=analytic,
            order=order,
            growth="entire",
            _fn=fn,
            _coeff_fn=coeff_fn,
        )

    @property
    def is_polynomial(self) -> bool:
        return self.coeffs is not None

    def coefficient(self, i: int) -> float:
        if self.is_polynomial:
            return self.coeffs[i] if i < len(self.coeffs) else 0.0
        return self._coeff_fn(i)

    def truncated(self, order: int) -> "TestFunction":
        """Polynomial with this function's series coefficients up to `order`."""
        coeffs = tuple(self.coefficient(i) for i in range(order + 1))
        return TestFunction.polynomial(coeffs, name=f"{self.name}@{order}")

    def __call__(self, x):
        arr = np.asarray(x, dtype=np.float64)
        out = _horner(self.coeffs, arr) if self.is_polynomial else self._fn(arr)
        return out if out.ndim else float(out)


def _horner(coeffs: tuple[float, ...], x: np.ndarray) -> np.ndarray:
    out = np.full_like(x, coeffs[-1])
    for c in coeffs[-2::-1]:
        out = out * x + c
    return out


def lss(summary: SpectralSummary, g: TestFunction) -> float:
    """Linear spectral statistic: the sum of g over all eigenvalues."""
    return float(np.sum(g(summary.eigenvalues)))


def trace_power(summary: SpectralSummary, k: int) -> float:
    """Power sum of the eigenvalues; equals the trace of the k-th matrix power."""
    if k < 0:
        raise ValueError(f"trace power must be >= 0, got {k}")
    return lss(summary, TestFunction.monomial(k))


def two_thirds_power(n: int) -> float:
    # cbrt keeps perfect cubes exact (e.g. 64 -> 16.0)
    return float(np.cbrt(float(n))) ** 2


def edge_statistics(summary: SpectralSummary, count: int) -> np.ndarray:
    """Top rescaled eigenvalues 2 n^(2/3) (lambda_i - 1), i = 1..count.

    The lower edge is available by passing the spectrum of the negated
    matrix; joint two-edge statistics are not modelled.
    """
    if count < 1 or count > summary.n:
        raise ValueError(f"count must be in [1, {summary.n}], got {count}")
    scale = 2.0 * two_thirds_power(summary.n)
    return scale * (summary.eigenvalues[:count] - 1.0)


def edge_trace_exponent(n: int, t: float) -> int:
    """floor(t * n^(2/3)) clamped to at least 1.

    A tiny fuzz keeps exact integer products (like t=1, n=64) from flooring
    down due to floating-point rounding.
    """
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    if t <= 0:
        raise ValueError(f"edge time must be > 0, got {t}")
    return max(1, int(math.floor(t * two_thirds_power(n) + 1e-9)))


def ks_distance_to_semicircle(eigenvalues: np.ndarray) -> float:
    """Kolmogorov distance between an eigenvalue sample and the semicircle CDF."""
    values = np.sort(np.asarray(eigenvalues, dtype=np.float64))
    m = len(values)
    if m == 0:
        raise ValueError("need at least one eigenvalue")
    cdf = semicircle_cdf(values)
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))
