"""Causal discovery for linear non-Gaussian data with latent confounders.

The library infers a causal graph whose directed arrows are direct causal
effects between observed variables and whose bi-directed arrows mark pairs
that share an unobserved common cause.  A simulation and benchmark harness
reproduces the synthetic evaluation protocol at desk scale.
"""

from .dataio import Dataset, emit_graph, ingest_csv, parse_graph_json, write_dataset_csv
from .discovery import (
    AncestorSets,
    CausalGraph,
    RcdConfig,
    SinkCheck,
    SweepResult,
    alpha_sweep,
    check_sink_candidate,
    extract_ancestors,
    find_confounders,
    find_parents,
    run_rcd,
)
from .errors import DegenerateInput, RcdError, UnsupportedSampleSize, ValidationError
from .evaluate import (
    BenchmarkResult,
    EdgeMetrics,
    TrialMetrics,
    random_orientation_baseline,
    run_benchmark,
    score_graph,
    summarize_trials,
)
from .regression import RegressionFit, mlhsicr_objective, mlhsicr_residuals, ols_residuals
from .simulate import (
    GroundTruthModel,
    SimConfig,
    generate_model,
    ground_truth_graph,
    model_from_dict,
    model_to_dict,
    sample_data,
    write_model_json,
)
from .stats import (
    TestResult,
    hsic_pvalue,
    hsic_statistic,
    pearson_corr_pvalue,
    shapiro_wilk_pvalue,
)

__version__ = "0.1.0"

__all__ = [
    "AncestorSets",
    "BenchmarkResult",
    "CausalGraph",
    "Dataset",
    "DegenerateInput",
    "EdgeMetrics",
    "GroundTruthModel",
    "RcdConfig",
    "RcdError",
    "RegressionFit",
    "SimConfig",
    "SinkCheck",
    "SweepResult",
    "TestResult",
    "TrialMetrics",
    "UnsupportedSampleSize",
    "ValidationError",
    "alpha_sweep",
    "check_sink_candidate",
    "emit_graph",
    "extract_ancestors",
    "find_confounders",
    "find_parents",
    "generate_model",
    "ground_truth_graph",
    "hsic_pvalue",
    "hsic_statistic",
    "ingest_csv",
    "mlhsicr_objective",
    "mlhsicr_residuals",
    "model_from_dict",
    "model_to_dict",
    "ols_residuals",
    "parse_graph_json",
    "pearson_corr_pvalue",
    "random_orientation_baseline",
    "run_benchmark",
    "run_rcd",
    "sample_data",
    "score_graph",
    "shapiro_wilk_pvalue",
    "summarize_trials",
    "write_dataset_csv",
    "write_model_json",
]
