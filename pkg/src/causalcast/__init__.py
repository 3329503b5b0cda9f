"""Forecasting baselines and residual-based causal discovery for time-series panels.

The package compares two routes to directed, signed causal graphs on
uniformly sampled panels: the classical Granger F-test and a
forecaster-agnostic residual test (fit any forecaster to the target
series, then ask whether lagged covariates explain its one-step errors).
Synthetic generators with known ground truth, forecasting baselines, a
wire protocol for external forecaster processes, and experiment sweeps
with scoring round out the toolkit.
"""

from .causality import (
    CausalityConfig,
    EdgeTest,
    granger_pair,
    infer_graph,
    residual_pair,
)
from .evalharness import (
    BenchmarkConfig,
    ExperimentReport,
    LogisticExperimentConfig,
    MouExperimentConfig,
    make_benchmark_panel,
    run_forecast_benchmark,
    run_logistic_experiment,
    run_mou_experiment,
)
from .forecast import (
    Forecast,
    ForecasterSpec,
    fit_predict,
    mape,
    rolling_one_step,
)
from .graphs import CausalGraph, Edge, GraphScore, score_graph
from .series import (
    MultiSeries,
    ScaleParams,
    Seed,
    SplitSpec,
    TimeSeries,
    minmax_scale,
    read_panel_csv,
    split,
    unscale,
    write_panel_csv,
)
from .synthgen import (
    LogisticSpec,
    MouSpec,
    gen_logistic,
    gen_mou,
    gen_mou_connectivity,
    lyapunov_stationary_cov,
    simulate_mou,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkConfig",
    "CausalGraph",
    "CausalityConfig",
    "Edge",
    "EdgeTest",
    "ExperimentReport",
    "Forecast",
    "ForecasterSpec",
    "GraphScore",
    "LogisticExperimentConfig",
    "LogisticSpec",
    "MouExperimentConfig",
    "MouSpec",
    "MultiSeries",
    "ScaleParams",
    "Seed",
    "SplitSpec",
    "TimeSeries",
    "fit_predict",
    "gen_logistic",
    "gen_mou",
    "gen_mou_connectivity",
    "granger_pair",
    "infer_graph",
    "lyapunov_stationary_cov",
    "make_benchmark_panel",
    "mape",
    "minmax_scale",
    "read_panel_csv",
    "residual_pair",
    "rolling_one_step",
    "run_forecast_benchmark",
    "run_logistic_experiment",
    "run_mou_experiment",
    "score_graph",
    "simulate_mou",
    "split",
    "unscale",
    "write_panel_csv",
    "__version__",
]
