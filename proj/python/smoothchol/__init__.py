"""Smooth Cholesky estimation of covariance and precision matrices for ordered data."""

from ._core import (
    CholFactor,
    DimensionError,
    Error,
    FitResult,
    NumericalError,
    TuneResult,
    UsageError,
    conditional_forecast,
    fit,
    forecast_error,
    kl_loss,
    make_truth,
    matrix_error,
    modified_cholesky,
    objective,
    simulate,
    solve_fused,
    solve_hp,
    solve_sparse_fused,
    solve_trend,
    standardize,
    total_variation,
    tune,
)

__version__ = "0.1.0"

__all__ = [
    "CholFactor",
    "DimensionError",
    "Error",
    "FitResult",
    "NumericalError",
    "TuneResult",
    "UsageError",
    "conditional_forecast",
    "fit",
    "forecast_error",
    "kl_loss",
    "make_truth",
    "matrix_error",
    "modified_cholesky",
    "objective",
    "simulate",
    "solve_fused",
    "solve_hp",
    "solve_sparse_fused",
    "solve_trend",
    "standardize",
    "total_variation",
    "tune",
]
