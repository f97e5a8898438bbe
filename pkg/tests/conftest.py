"""Shared fixtures: the large seeded Monte Carlo runs used by several tests.

Everything derives from one master seed so the whole suite is reproducible;
the heavy record sets are session-scoped and computed once.  Build times are
tracked so the acceptance tests can report and bound total runtime per
criterion even when a fixture was first built by an earlier test.
"""

from __future__ import annotations

import os
import time

import pytest

import wignerlab as wl

MASTER_SEED = int(os.environ.get("WIGNERLAB_TEST_SEED", "7"))
WORKERS = int(os.environ.get("WIGNERLAB_TEST_WORKERS", str(min(2, os.cpu_count() or 1))))

MC_BUILD_SECONDS: dict[str, float] = {}


def _timed_build(name, builder):
    start = time.perf_counter()
    result = builder()
    MC_BUILD_SECONDS[name] = time.perf_counter() - start
    return result


@pytest.fixture(scope="session")
def workers() -> int:
    return WORKERS


@pytest.fixture(scope="session")
def gaussian_records_n400():
    """Gaussian n=400, N=2000: LSS (x^3, exp), trace powers 2 and 3, edge stats."""
    config = wl.ExperimentConfig(
        ensemble="gaussian",
        dimensions=(400,),
        replicas=2000,
        seed=MASTER_SEED,
        functions=(
            wl.FunctionSpec(name="cube", coeffs=(0.0, 0.0, 0.0, 1.0)),
            wl.FunctionSpec(name="exp", analytic="exp", orders=(12,)),
        ),
        powers=(2, 3),
        edge_times=(1.0,),
        edge_count=2,
    )
    return _timed_build(
        "gaussian_records_n400", lambda: wl.run_monte_carlo(config, workers=WORKERS)
    )


@pytest.fixture(scope="session")
def gaussian_records_n100():
    config = wl.ExperimentConfig(
        ensemble="gaussian",
        dimensions=(100,),
        replicas=2000,
        seed=MASTER_SEED,
        powers=(2, 3),
        edge_times=(1.0,),
        edge_count=2,
    )
    return _timed_build(
        "gaussian_records_n100", lambda: wl.run_monte_carlo(config, workers=WORKERS)
    )


@pytest.fixture(scope="session")
def rademacher_records_n400():
    config = wl.ExperimentConfig(
        ensemble="rademacher",
        dimensions=(400,),
        replicas=2000,
        seed=MASTER_SEED,
        edge_times=(1.0,),
        edge_count=1,
    )
    return _timed_build(
        "rademacher_records_n400", lambda: wl.run_monte_carlo(config, workers=WORKERS)
    )


@pytest.fixture(scope="session")
def gaussian_records_n200():
    """Gaussian n=200, N=500: even trace powers and exp truncations."""
    config = wl.ExperimentConfig(
        ensemble="gaussian",
        dimensions=(200,),
        replicas=500,
        seed=MASTER_SEED,
        functions=(wl.FunctionSpec(name="exp", analytic="exp", orders=(4, 8, 12)),),
        powers=(2, 4, 6, 8),
    )
    return _timed_build(
        "gaussian_records_n200", lambda: wl.run_monte_carlo(config, workers=WORKERS)
    )


@pytest.fixture(scope="session")
def edge_scan_rows():
    """Edge-length trace scan at t=1 over n in {100, 200, 400, 800}, N=1000."""
    return _timed_build(
        "edge_scan_rows",
        lambda: wl.edge_boundedness_scan(
            1.0, (100, 200, 400, 800), 1000,
            ensemble="gaussian", seed=MASTER_SEED, workers=WORKERS,
        ),
    )
