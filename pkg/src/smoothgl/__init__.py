"""Time-varying sparse precision estimation with temporal smoothing.

Estimates a sequence of sparse inverse-covariance matrices from a
multivariate time series: kernel-weighted local covariances feed an ADMM
solver whose penalty combines graphical-lasso sparsity with a fused-lasso
term that keeps consecutive networks similar. Includes tuning (leave-one-out
kernel width, AIC penalty selection), simulation of piecewise-stationary
network data, baseline estimators, evaluation metrics, replicated
benchmarks, and a command-line interface.
"""

__version__ = "0.1.0"

from .data import (
    EDGE_TOLERANCE,
    GraphSequence,
    MatrixSequence,
    TimeSeries,
    load_csv,
    precision_to_graphs,
    read_precision_sequence,
    write_csv,
    write_precision_sequence,
)
from .kernels import KernelSpec, estimate_covariances, estimate_means, kernel_weight
from .eigensym import EigenPair, eigh
from .flsa import FlsaProblem, flsa_solve
from .solver import NumericFailure, SingleResult, SolverConfig, objective, solve
from .tuning import (
    TuningFailure,
    TuningGrid,
    TuningReport,
    aic,
    cv_score,
    degrees_of_freedom,
    select_h,
    select_lambdas,
)
from .simgen import (
    EdgeStrengthLaw,
    GraphModel,
    GroundTruth,
    Segment,
    SimScenario,
    gen_graph,
    graph_to_precision,
    replicate_seed,
    simulate,
)
from .metrics import (
    BetweennessChange,
    PrfCurve,
    betweenness,
    betweenness_change,
    f_curve,
    holm_adjust,
    mean_f,
    prf_at_t,
    wilcoxon_rank_sum,
)
from .baselines import BaselineConfig, baseline_estimate, tune_baseline
from .pipeline import AutoFit, auto_fit, fit
from .presets import PRESET_NAMES, preset
from .benchmark import BenchmarkReport, run_benchmark

__all__ = [
    "AutoFit",
    "BaselineConfig",
    "BenchmarkReport",
    "BetweennessChange",
    "EDGE_TOLERANCE",
    "EdgeStrengthLaw",
    "EigenPair",
    "FlsaProblem",
    "GraphModel",
    "GraphSequence",
    "GroundTruth",
    "KernelSpec",
    "MatrixSequence",
    "NumericFailure",
    "PRESET_NAMES",
    "PrfCurve",
    "Segment",
    "SimScenario",
    "SingleResult",
    "SolverConfig",
    "TimeSeries",
    "TuningFailure",
    "TuningGrid",
    "TuningReport",
    "aic",
    "auto_fit",
    "baseline_estimate",
    "betweenness",
    "betweenness_change",
    "cv_score",
    "degrees_of_freedom",
    "eigh",
    "estimate_covariances",
    "estimate_means",
    "f_curve",
    "fit",
    "flsa_solve",
    "gen_graph",
    "graph_to_precision",
    "holm_adjust",
    "kernel_weight",
    "load_csv",
    "mean_f",
    "objective",
    "precision_to_graphs",
    "preset",
    "prf_at_t",
    "read_precision_sequence",
    "replicate_seed",
    "run_benchmark",
    "select_h",
    "select_lambdas",
    "simulate",
    "solve",
    "tune_baseline",
    "wilcoxon_rank_sum",
    "write_csv",
    "write_precision_sequence",
    "__version__",
]
