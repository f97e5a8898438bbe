"""Seeded Monte Carlo experiments over the matrix ensembles.

One engine (`run_monte_carlo`) produces per-replica records holding every
observable the statistical reductions need; the reductions themselves are
pure functions of those records.  Replica seeds derive from (master seed,
dimension, replica index), eigensolves run single-threaded, and resampling
seeds derive from the master seed, so records, summaries, p-values and
standard errors are reproducible byte-for-byte at any worker count.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import multiprocessing
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np
from threadpoolctl import threadpool_limits

from .ensemble import get_distribution, sample_wigner, semicircle_cdf
from .errors import CapacityError
from .moments import moment_table, trace_moment_by_classes
from .rng import derive_key, tag64
from .spectral import (
    TestFunction,
    edge_statistics,
    edge_trace_exponent,
    eigenvalues_sym,
    lss,
    trace_power,
)

# Fixed histogram grid for pooled empirical-spectral-distribution checks.
ESD_EDGES = np.linspace(-1.28, 1.28, 257)

DEFAULT_EIG_BUDGET = 2 * 10**12  # sum over replicas of n^3
EXACT_CENTERING_MAX_N = 4


@dataclass(frozen=True)
class FunctionSpec:
    """Serializable description of a test function for experiment configs.

    Exactly one of ``coeffs`` (explicit polynomial) or ``analytic`` (named
    power series) must be set.  ``orders`` lists truncation orders whose
    linear spectral statistics are recorded alongside the full function.
    """

    name: str
    coeffs: Optional[tuple[float, ...]] = None
    analytic: Optional[str] = None
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise ValueError("functions: every function needs a name")
        if (self.coeffs is None) == (self.analytic is None):
            raise ValueError(
                f"functions[{self.name}]: set exactly one of 'coeffs' or 'analytic'"
            )
        if any((not isinstance(i, int)) or i < 0 for i in self.orders):
            raise ValueError(f"functions[{self.name}]: orders must be integers >= 0")

    def resolve(self) -> TestFunction:
        if self.coeffs is not None:
            return TestFunction.polynomial(self.coeffs, name=self.name)
        order = max(self.orders) if self.orders else 16
        return TestFunction.from_name(self.analytic, order=order, name=self.name)

    def to_dict(self) -> dict:
        out: dict = {"name": self.name}
        if self.coeffs is not None:
            out["coeffs"] = list(self.coeffs)
        if self.analytic is not None:
            out["analytic"] = self.analytic
        if self.orders:
            out["orders"] = list(self.orders)
        return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment; the master seed is mandatory."""

    ensemble: str
    dimensions: tuple[int, ...]
    replicas: int
    seed: int
    functions: tuple[FunctionSpec, ...] = ()
    powers: tuple[int, ...] = ()
    edge_times: tuple[float, ...] = ()
    edge_count: int = 1
    checks: tuple[str, ...] = ()
    compare_ensemble: Optional[str] = None

    def __post_init__(self):
        get_distribution(self.ensemble)  # raises on unknown names
        if self.compare_ensemble is not None:
            get_distribution(self.compare_ensemble)
        if not self.dimensions:
            raise ValueError("dimensions: need at least one dimension")
        if any((not isinstance(n, int)) or n < 1 for n in self.dimensions):
            raise ValueError(f"dimensions: must be integers >= 1, got {self.dimensions}")
        if self.replicas < 2:
            raise ValueError(f"replicas: must be >= 2, got {self.replicas}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed: must be an integer in [0, 2^64)")
        if any((not isinstance(m, int)) or m < 1 for m in self.powers):
            raise ValueError(f"powers: must be integers >= 1, got {self.powers}")
        if any(t <= 0 for t in self.edge_times):
            raise ValueError(f"edge_times: must be > 0, got {self.edge_times}")
        if self.edge_count < 1:
            raise ValueError(f"edge_count: must be >= 1, got {self.edge_count}")
        names = [spec.name for spec in self.functions]
        if len(set(names)) != len(names):
            raise ValueError(f"functions: names must be unique, got {names}")

    def to_dict(self) -> dict:
        return {
            "ensemble": self.ensemble,
            "dimensions": list(self.dimensions),
            "replicas": self.replicas,
            "seed": self.seed,
            "functions": [spec.to_dict() for spec in self.functions],
            "powers": list(self.powers),
            "edge_times": list(self.edge_times),
            "edge_count": self.edge_count,
            "checks": list(self.checks),
            "compare_ensemble": self.compare_ensemble,
        }

    def digest(self) -> str:
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def with_ensemble(self, ensemble: str) -> "ExperimentConfig":
        return ExperimentConfig(
            ensemble=ensemble,
            dimensions=self.dimensions,
            replicas=self.replicas,
            seed=self.seed,
            functions=self.functions,
            powers=self.powers,
            edge_times=self.edge_times,
            edge_count=self.edge_count,
            checks=self.checks,
            compare_ensemble=None,
        )


@dataclass(frozen=True)
class RunRecord:
    """All observables of one replica; a pure function of (config, n, replica)."""

    n: int
    replica: int
    seed: int
    ensemble: str
    eig_digest: str
    lss: dict[str, float]
    lss_truncated: dict[str, dict[str, float]]
    trace_powers: dict[str, float]
    edge: tuple[float, ...]
    esd_cum: tuple[int, ...]

    def to_json(self) -> str:
        payload = asdict(self)
        payload["kind"] = "record"
        payload["edge"] = list(self.edge)
        payload["esd_cum"] = list(self.esd_cum)
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def replica_seed(master_seed: int, n: int, replica: int) -> int:
    """Derive the per-replica sampling seed from (master seed, n, replica)."""
    return derive_key(tag64("wignerlab.replica"), master_seed, (n << 32) | replica)


def _edge_exponents(n: int, edge_times: Sequence[float]) -> list[int]:
    exponents: set[int] = set()
    for t in edge_times:
        k = edge_trace_exponent(n, t)
        exponents.update((k, 2 * k, 2 * k + 1))
    return sorted(exponents)


def _compute_record(config: ExperimentConfig, n: int, replica: int) -> RunRecord:
    seed = replica_seed(config.seed, n, replica)
    dist = get_distribution(config.ensemble)
    sample = sample_wigner(n, dist, seed)
    summary = eigenvalues_sym(sample)

    lss_values: dict[str, float] = {}
    lss_truncated: dict[str, dict[str, float]] = {}
    for spec in config.functions:
        g = spec.resolve()
        lss_values[spec.name] = lss(summary, g)
        if spec.orders:
            lss_truncated[spec.name] = {
                str(order): lss(summary, g.truncated(order)) for order in spec.orders
            }

    needed = sorted(set(config.powers) | set(_edge_exponents(n, config.edge_times)))
    powers = {str(k): trace_power(summary, k) for k in needed}
    edge = tuple(float(v) for v in edge_statistics(summary, config.edge_count))
    ascending = summary.eigenvalues[::-1]
    esd_cum = tuple(int(c) for c in np.searchsorted(ascending, ESD_EDGES, side="right"))

    return RunRecord(
        n=n,
        replica=replica,
        seed=seed,
        ensemble=config.ensemble,
        eig_digest=hashlib.sha256(summary.eigenvalues.tobytes()).hexdigest(),
        lss=lss_values,
        lss_truncated=lss_truncated,
        trace_powers=powers,
        edge=edge,
        esd_cum=esd_cum,
    )


def _record_task(task: tuple[ExperimentConfig, int, int]) -> RunRecord:
    return _compute_record(*task)


_WORKER_LIMIT = None


def _worker_init() -> None:
    # One BLAS thread per worker: keeps eigensolves bit-identical to the
    # sequential path and avoids thread oversubscription.
    global _WORKER_LIMIT
    _WORKER_LIMIT = threadpool_limits(limits=1)


def run_monte_carlo(
    config: ExperimentConfig,
    workers: int = 1,
    budget: int = DEFAULT_EIG_BUDGET,
) -> list[RunRecord]:
    """Run all replicas over the dimension grid; deterministic at any worker count.

    Records are ordered by (position of n in the grid, replica index).
    """
    if config.edge_count > min(config.dimensions):
        raise ValueError(
            f"edge_count: {config.edge_count} exceeds the smallest dimension "
            f"{min(config.dimensions)}"
        )
    work = config.replicas * sum(n**3 for n in config.dimensions)
    if work > budget:
        raise CapacityError(
            f"eigensolve work {work} exceeds the run budget {budget}; "
            "reduce dimensions or replicas"
        )

    tasks = [
        (config, n, replica)
        for n in config.dimensions
        for replica in range(config.replicas)
    ]
    if workers <= 1:
        with threadpool_limits(limits=1):
            return [_record_task(task) for task in tasks]
    # fork keeps this usable from scripts without an importable __main__;
    # each worker pins BLAS to one thread, matching the sequential path.
    ctx = multiprocessing.get_context("fork")
    chunksize = max(1, len(tasks) // (workers * 8))
    with ctx.Pool(workers, initializer=_worker_init) as pool:
        return pool.map(_record_task, tasks, chunksize=chunksize)


def records_for(records: Sequence[RunRecord], n: int) -> list[RunRecord]:
    return [r for r in records if r.n == n]


def pooled_esd_ks(records: Sequence[RunRecord]) -> float:
    """Kolmogorov distance of the pooled spectral distribution to the semicircle.

    Uses the fixed histogram grid carried by the records; eigenvalue mass
    outside the grid shows up as a CDF deficit at the boundary edges.
    """
    if not records:
        raise ValueError("need at least one record")
    total = sum(r.n for r in records)
    pooled = np.sum([r.esd_cum for r in records], axis=0) / total
    return float(np.max(np.abs(pooled - semicircle_cdf(ESD_EDGES))))


def _center(samples: np.ndarray) -> np.ndarray:
    """Center by the sample mean, exactly invariant under exact float shifts.

    Works entirely in coordinates relative to the first sample: when every
    element shifts by a constant exactly, the relative coordinates do not
    change at all, so neither does the centered output (bit for bit).  In
    exact arithmetic this equals ``samples - mean(samples)``.
    """
    samples = np.asarray(samples, dtype=np.float64)
    deviations = samples - samples[0]
    return deviations - np.mean(deviations)


def _resampler(label: str, seed: int) -> np.random.Generator:
    return np.random.default_rng(derive_key(tag64(label), seed))


@dataclass(frozen=True)
class FactorizationResult:
    n: int
    m_powers: tuple[int, ...]
    edge_exponents: tuple[int, ...]
    joint: float
    product: float
    gap: float
    stderr: float
    centering: str


def estimate_joint_factorization(
    records: Sequence[RunRecord],
    m_list: Sequence[int],
    t_list: Sequence[float],
    *,
    bootstrap: int = 200,
    seed: int = 0,
    centering: str = "auto",
) -> FactorizationResult:
    """Monte Carlo joint centered moment vs the product of its two marginals.

    The first group holds the fixed trace powers, the second the edge-length
    powers [t * n^(2/3)].  Centering is empirical except at tiny n, where the
    exact oracle expectations are available (``centering`` records the choice).
    The standard error of the gap comes from a seeded bootstrap over replicas.
    """
    records = list(records)
    if len(records) < 100:
        raise ValueError(f"need at least 100 records, got {len(records)}")
    n_values = {r.n for r in records}
    if len(n_values) != 1:
        raise ValueError(f"records must share one dimension, got {sorted(n_values)}")
    n = records[0].n

    m_powers = tuple(int(m) for m in m_list)
    exponents = tuple(edge_trace_exponent(n, t) for t in t_list)

    def column(k: int) -> np.ndarray:
        key = str(k)
        try:
            return np.array([r.trace_powers[key] for r in records])
        except KeyError:
            raise ValueError(f"records do not carry trace power {k}") from None

    cols_a = [column(m) for m in m_powers]
    cols_b = [column(k) for k in exponents]

    mode = centering
    if mode == "auto":
        mode = "exact" if n <= EXACT_CENTERING_MAX_N else "empirical"
    if mode == "exact":
        table = moment_table(get_distribution(records[0].ensemble))
        try:
            centered_a = [c - trace_moment_by_classes(n, m, table) for c, m in zip(cols_a, m_powers)]
            centered_b = [c - trace_moment_by_classes(n, k, table) for c, k in zip(cols_b, exponents)]
        except CapacityError:
            mode = "empirical"
    if mode == "empirical":
        centered_a = [_center(c) for c in cols_a]
        centered_b = [_center(c) for c in cols_b]

    def resampled_gap(idx: np.ndarray) -> float:
        # Empirical centering is part of the estimator, so bootstrap
        # replicates re-center within the resample.
        prod_a = np.ones(len(idx))
        for c in centered_a:
            sub = c[idx]
            prod_a = prod_a * (sub if mode == "exact" else _center(sub))
        prod_b = np.ones(len(idx))
        for c in centered_b:
            sub = c[idx]
            prod_b = prod_b * (sub if mode == "exact" else _center(sub))
        joint = float(np.mean(prod_a * prod_b))
        return joint - float(np.mean(prod_a)) * float(np.mean(prod_b))

    prod_a = np.ones(len(records))
    for c in centered_a:
        prod_a = prod_a * c
    prod_b = np.ones(len(records))
    for c in centered_b:
        prod_b = prod_b * c
    joint = float(np.mean(prod_a * prod_b))
    product = float(np.mean(prod_a)) * float(np.mean(prod_b))
    gap = joint - product

    rng = _resampler("wignerlab.bootstrap.factorization", seed)
    gaps = np.empty(bootstrap)
    for b in range(bootstrap):
        idx = rng.integers(0, len(records), size=len(records))
        gaps[b] = resampled_gap(idx)
    stderr = float(np.std(gaps, ddof=1))

    return FactorizationResult(
        n=n,
        m_powers=m_powers,
        edge_exponents=exponents,
        joint=joint,
        product=product,
        gap=gap,
        stderr=stderr,
        centering=mode,
    )


@dataclass(frozen=True)
class IndependenceResult:
    pearson: float
    dcor: float
    p_value: float
    permutations: int


def _centered_distance_matrix(x: np.ndarray) -> np.ndarray:
    d = np.abs(x[:, None] - x[None, :])
    row = d.mean(axis=1, keepdims=True)
    col = d.mean(axis=0, keepdims=True)
    return d - row - col + d.mean()


def _dcor_from_centered(a: np.ndarray, b: np.ndarray) -> float:
    s_ab = float(np.mean(a * b))
    s_aa = float(np.mean(a * a))
    s_bb = float(np.mean(b * b))
    if s_aa <= 0.0 or s_bb <= 0.0:
        return 0.0
    return math.sqrt(max(s_ab, 0.0) / math.sqrt(s_aa * s_bb))


def independence_test(
    x: np.ndarray,
    y: np.ndarray,
    *,
    permutations: int = 500,
    seed: int = 0,
) -> IndependenceResult:
    """Pearson correlation, distance correlation, and a permutation p-value.

    The p-value is (1 + #{permuted dcor >= observed}) / (1 + permutations),
    with seeded shuffles of y against x.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"need two equal-length vectors, got {x.shape} and {y.shape}")
    if len(x) < 100:
        raise ValueError(f"need at least 100 samples, got {len(x)}")

    pearson = float(np.corrcoef(x, y)[0, 1])
    a = _centered_distance_matrix(x)
    b = _centered_distance_matrix(y)
    observed = _dcor_from_centered(a, b)

    rng = _resampler("wignerlab.permutation.independence", seed)
    exceeded = 0
    for _ in range(permutations):
        perm = rng.permutation(len(y))
        if _dcor_from_centered(a, b[np.ix_(perm, perm)]) >= observed:
            exceeded += 1
    p_value = (1 + exceeded) / (1 + permutations)
    return IndependenceResult(
        pearson=pearson, dcor=observed, p_value=p_value, permutations=permutations
    )


@dataclass(frozen=True)
class GaussianityResult:
    skewness: tuple[float, ...]
    excess_kurtosis: tuple[float, ...]
    wick_gap: float
    wick_stderr: float

    @property
    def max_abs_skewness(self) -> float:
        return max(abs(s) for s in self.skewness)

    @property
    def max_abs_excess_kurtosis(self) -> float:
        return max(abs(k) for k in self.excess_kurtosis)


def _wick_gaps(centered: np.ndarray, tuples: list[tuple[int, int, int, int]]) -> np.ndarray:
    cov = centered.T @ centered / len(centered)
    gaps = np.empty(len(tuples))
    for i, (a, b, c, d) in enumerate(tuples):
        m4 = float(np.mean(centered[:, a] * centered[:, b] * centered[:, c] * centered[:, d]))
        wick = cov[a, b] * cov[c, d] + cov[a, c] * cov[b, d] + cov[a, d] * cov[b, c]
        gaps[i] = m4 - wick
    return gaps


def gaussianity_check(
    samples: np.ndarray,
    *,
    bootstrap: int = 200,
    seed: int = 0,
) -> GaussianityResult:
    """Moment diagnostics against Gaussianity for a sample vector or matrix.

    Per component: standardized skewness and excess kurtosis.  Across all
    4-tuples of components: the largest deviation of the empirical fourth
    moment from its pair-partition (Wick) prediction, with a bootstrap
    standard error (the largest per-tuple one, for a conservative scale).
    """
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"need samples of shape (N,) or (N, d), got {arr.shape}")
    count, dim = arr.shape
    if count < 500:
        raise ValueError(f"need at least 500 samples, got {count}")

    centered = np.column_stack([_center(arr[:, j]) for j in range(dim)])
    m2 = np.mean(centered**2, axis=0)
    if np.any(m2 == 0.0):
        raise ValueError("sample variance is zero; moments are undefined")
    m3 = np.mean(centered**3, axis=0)
    m4 = np.mean(centered**4, axis=0)
    skewness = tuple(float(v) for v in m3 / m2**1.5)
    excess_kurtosis = tuple(float(v) for v in m4 / m2**2 - 3.0)

    tuples = list(itertools.combinations_with_replacement(range(dim), 4))
    gaps = _wick_gaps(centered, tuples)
    wick_gap = float(np.max(np.abs(gaps)))

    rng = _resampler("wignerlab.bootstrap.gaussianity", seed)
    boot = np.empty((bootstrap, len(tuples)))
    for b in range(bootstrap):
        idx = rng.integers(0, count, size=count)
        resampled = np.column_stack([_center(arr[idx, j]) for j in range(dim)])
        boot[b] = _wick_gaps(resampled, tuples)
    wick_stderr = float(np.max(np.std(boot, axis=0, ddof=1)))

    return GaussianityResult(
        skewness=skewness,
        excess_kurtosis=excess_kurtosis,
        wick_gap=wick_gap,
        wick_stderr=wick_stderr,
    )


@dataclass(frozen=True)
class TruncationPoint:
    order: int
    variance: float
    stderr: float


def truncation_variance_scan(
    g: FunctionSpec,
    orders: Sequence[int],
    n: int,
    replicas: int,
    *,
    ensemble: str = "gaussian",
    seed: int = 0,
    workers: int = 1,
    bootstrap: int = 200,
) -> list[TruncationPoint]:
    """Variance of (full minus truncated) linear spectral statistic per order."""
    orders = tuple(int(i) for i in orders)
    spec = FunctionSpec(name=g.name, coeffs=g.coeffs, analytic=g.analytic, orders=orders)
    config = ExperimentConfig(
        ensemble=ensemble,
        dimensions=(n,),
        replicas=replicas,
        seed=seed,
        functions=(spec,),
    )
    records = run_monte_carlo(config, workers=workers)
    rng = _resampler("wignerlab.bootstrap.truncation", seed)

    points = []
    for order in orders:
        diffs = np.array(
            [r.lss[spec.name] - r.lss_truncated[spec.name][str(order)] for r in records]
        )
        variance = float(np.var(diffs, ddof=1))
        boot = np.empty(bootstrap)
        for b in range(bootstrap):
            idx = rng.integers(0, len(diffs), size=len(diffs))
            boot[b] = np.var(diffs[idx], ddof=1)
        points.append(
            TruncationPoint(order=order, variance=variance, stderr=float(np.std(boot, ddof=1)))
        )
    return points


@dataclass(frozen=True)
class EdgeScanRow:
    n: int
    exponent: int
    even_mean: float
    even_stderr: float
    odd_mean: float
    odd_stderr: float


def edge_boundedness_scan(
    t: float,
    n_list: Sequence[int],
    replicas: int,
    *,
    ensemble: str = "gaussian",
    seed: int = 0,
    workers: int = 1,
) -> list[EdgeScanRow]:
    """Means of Tr W^(2k) and Tr W^(2k+1) with k = [t n^(2/3)], per dimension."""
    config = ExperimentConfig(
        ensemble=ensemble,
        dimensions=tuple(int(n) for n in n_list),
        replicas=replicas,
        seed=seed,
        edge_times=(float(t),),
    )
    records = run_monte_carlo(config, workers=workers)
    rows = []
    for n in config.dimensions:
        subset = records_for(records, n)
        k = edge_trace_exponent(n, t)
        even = np.array([r.trace_powers[str(2 * k)] for r in subset])
        odd = np.array([r.trace_powers[str(2 * k + 1)] for r in subset])
        rows.append(
            EdgeScanRow(
                n=n,
                exponent=k,
                even_mean=float(np.mean(even)),
                even_stderr=float(np.std(even, ddof=1) / math.sqrt(len(even))),
                odd_mean=float(np.mean(odd)),
                odd_stderr=float(np.std(odd, ddof=1) / math.sqrt(len(odd))),
            )
        )
    return rows


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov distance."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("need nonempty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / len(a)
    fb = np.searchsorted(b, grid, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def edge_distribution_compare(
    ensemble_a: str,
    ensemble_b: str,
    n: int,
    replicas: int,
    *,
    seed: int = 0,
    workers: int = 1,
) -> float:
    """KS distance between the rescaled-largest-eigenvalue samples of two ensembles."""
    if replicas < 500:
        raise ValueError(f"need at least 500 replicas, got {replicas}")
    base = ExperimentConfig(
        ensemble=ensemble_a,
        dimensions=(int(n),),
        replicas=replicas,
        seed=seed,
        edge_count=1,
    )
    records_a = run_monte_carlo(base, workers=workers)
    records_b = run_monte_carlo(base.with_ensemble(ensemble_b), workers=workers)
    s1_a = np.array([r.edge[0] for r in records_a])
    s1_b = np.array([r.edge[0] for r in records_b])
    return ks_two_sample(s1_a, s1_b)
