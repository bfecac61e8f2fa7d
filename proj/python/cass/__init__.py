"""Subspace segmentation by trace Lasso regression.

Matrices follow the C++ convention: one sample per column (d x n).
"""

from ._cass import (
    AdmConfig,
    AdmResult,
    ErrorStats,
    InfeasibleError,
    LabeledData,
    SegmentationConfig,
    accuracy,
    affinity,
    coefficient_matrix,
    error_stats,
    gen_synthetic,
    load_csv,
    load_idx,
    normalize_columns,
    nuclear_norm,
    pca_project,
    segment,
    solve_exact,
    solve_lrr,
    solve_lsr,
    solve_noisy,
    solve_ssc,
    spectral_cluster,
    svt,
    trace_lasso_norm,
)

__all__ = [name for name in dir() if not name.startswith("_")]
