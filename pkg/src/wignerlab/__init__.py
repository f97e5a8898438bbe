"""wignerlab: desk-scale laboratory for Wigner-matrix spectral statistics.

Combinatorial trace-expansion machinery (words, word graphs, Dyck paths,
word merging), exact tiny-n moment oracles, and reproducible seeded Monte
Carlo experiments over eigenvalue statistics, all under the scaling where
the limiting spectrum is [-1, 1].
"""

__version__ = "0.1.0"

from .ensemble import (
    DISTRIBUTIONS,
    EntryDistribution,
    WignerSample,
    get_distribution,
    sample_wigner,
    semicircle_cdf,
    semicircle_density,
    semicircle_moment,
)
from .errors import CapacityError, NoSharedEdgeError
from .harness import (
    ExperimentConfig,
    FunctionSpec,
    RunRecord,
    edge_boundedness_scan,
    edge_distribution_compare,
    estimate_joint_factorization,
    gaussianity_check,
    independence_test,
    ks_two_sample,
    pooled_esd_ks,
    run_monte_carlo,
    truncation_variance_scan,
)
from .merge import find_shared_edge, merge_words
from .moments import (
    MomentTable,
    exact_joint_centered,
    expected_X_sentence,
    expected_X_w,
    joint_centered_split,
    moment_table,
    trace_moment_by_classes,
    trace_moment_direct,
)
from .spectral import (
    SpectralSummary,
    TestFunction,
    edge_statistics,
    edge_trace_exponent,
    eigenvalues_sym,
    ks_distance_to_semicircle,
    lss,
    trace_power,
)
from .words import (
    DyckPath,
    Sentence,
    Word,
    WordClass,
    WordGraph,
    canonical_form,
    classify,
    dyck_to_wigner,
    enumerate_closed_classes,
    enumerate_dyck,
    equivalent,
    wigner_to_dyck,
    word,
    word_graph,
)

__all__ = [
    "CapacityError",
    "DISTRIBUTIONS",
    "DyckPath",
    "EntryDistribution",
    "ExperimentConfig",
    "FunctionSpec",
    "MomentTable",
    "NoSharedEdgeError",
    "RunRecord",
    "Sentence",
    "SpectralSummary",
    "TestFunction",
    "WignerSample",
    "Word",
    "WordClass",
    "WordGraph",
    "canonical_form",
    "classify",
    "dyck_to_wigner",
    "edge_boundedness_scan",
    "edge_distribution_compare",
    "edge_statistics",
    "edge_trace_exponent",
    "eigenvalues_sym",
    "enumerate_closed_classes",
    "enumerate_dyck",
    "equivalent",
    "estimate_joint_factorization",
    "exact_joint_centered",
    "expected_X_sentence",
    "expected_X_w",
    "find_shared_edge",
    "gaussianity_check",
    "get_distribution",
    "independence_test",
    "joint_centered_split",
    "ks_distance_to_semicircle",
    "ks_two_sample",
    "lss",
    "merge_words",
    "moment_table",
    "pooled_esd_ks",
    "run_monte_carlo",
    "sample_wigner",
    "semicircle_cdf",
    "semicircle_density",
    "semicircle_moment",
    "trace_moment_by_classes",
    "trace_moment_direct",
    "trace_power",
    "truncation_variance_scan",
    "wigner_to_dyck",
    "word",
    "word_graph",
]
