"""Fit, diagnose and extrapolate log-log scaling laws from experiment logs."""

__version__ = "0.1.0"

from .dataset import RunDataset, RunRecord, load_runs, reference_dataset, save_runs, total_compute
from .diagnostics import DiagnosticsReport, run_all
from .ols import (
    IntervalEstimate,
    OlsFit,
    OLSRegressor,
    RegressionFrame,
    bootstrap,
    bootstrap_ci,
    coefficient_inference,
    contrast,
    fit,
    make_frame,
    predict_interval,
    standardize,
)
from .pareto import CostLossPoint, pareto_frontier
from .powerlaw import (
    ComputeLawFit,
    ComputeLawRegressor,
    ScalingLawFit,
    ScalingLawRegressor,
    extrapolate,
    fit_compute_law,
    fit_scaling_law,
    predict_curve,
)
from .trends import TrendPoint, fit_trend

__all__ = [
    "ComputeLawFit",
    "ComputeLawRegressor",
    "CostLossPoint",
    "DiagnosticsReport",
    "IntervalEstimate",
    "OLSRegressor",
    "OlsFit",
    "RegressionFrame",
    "RunDataset",
    "RunRecord",
    "ScalingLawFit",
    "ScalingLawRegressor",
    "TrendPoint",
    "bootstrap",
    "bootstrap_ci",
    "coefficient_inference",
    "contrast",
    "extrapolate",
    "fit",
    "fit_compute_law",
    "fit_scaling_law",
    "fit_trend",
    "load_runs",
    "make_frame",
    "pareto_frontier",
    "predict_curve",
    "predict_interval",
    "reference_dataset",
    "run_all",
    "save_runs",
    "standardize",
    "total_compute",
]
