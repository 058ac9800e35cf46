"""Variable screening for wide binary data via leverage and cross-leverage scores.

The package stacks the design matrix and the response into [X, y]^T,
reads per-variable leverage and response cross-leverage scores off its
orthogonal projector, and selects column subsets of size ceil(n ln n) (or
any k) under four criteria: cross-leverage, leverage, correlation, and
per-variable test p-values.  On top of the screening layer it ships a
synthetic-data generator with known interaction ground truth, logic-model
fitting by simulated annealing for the reduced data, simulation studies,
and SNP-table ingestion with raster export.
"""

__version__ = "0.1.0"

from .dataset import Dataset
from .scores import (
    DegenerateResponseError,
    RankZeroError,
    ScoreSet,
    augment,
    compute_scores,
    hat_matrix_dense,
    matrix_scores,
)
from .stats import (
    UnivariateTestResult,
    betainc_reg,
    kde,
    kde_grid,
    pearson,
    silverman_bandwidth,
    t_sf_two_sided,
    univariate_pvalue,
    univariate_pvalues,
)
from .selection import (
    SelectionResult,
    SelectionSpec,
    sample_size,
    select,
    select_combined,
)
from .simulate import (
    ScenarioSpec,
    builtin_scenario,
    calibrate,
    calibrate_per_term,
    dnf_prevalence,
    eval_dnf,
    generate,
    replicate_seed,
)
from .logic import (
    AnnealParams,
    DnfSizeError,
    FittedLogicModel,
    ImportanceReport,
    Leaf,
    Op,
    anneal_fit,
    dnf_to_string,
    ensemble_fit,
    eval_tree,
    propose_move,
    to_dnf,
    tree_score,
)
from .experiments import (
    ComboGrid,
    DensityStudyResult,
    ExperimentConfig,
    SuccessHistogram,
    run_combo_grid,
    run_density_study,
    run_pipeline_study,
    run_success_study,
)
from .io import (
    RawTable,
    TableParseError,
    drop_uninformative,
    impute,
    load_table,
    raster_export,
    to_dataset,
    write_dataset_csv,
)

__all__ = [
    "__version__",
    "Dataset",
    "ScoreSet",
    "augment",
    "compute_scores",
    "matrix_scores",
    "hat_matrix_dense",
    "DegenerateResponseError",
    "RankZeroError",
    "UnivariateTestResult",
    "pearson",
    "univariate_pvalue",
    "univariate_pvalues",
    "betainc_reg",
    "t_sf_two_sided",
    "kde",
    "kde_grid",
    "silverman_bandwidth",
    "SelectionSpec",
    "SelectionResult",
    "sample_size",
    "select",
    "select_combined",
    "ScenarioSpec",
    "builtin_scenario",
    "calibrate",
    "calibrate_per_term",
    "dnf_prevalence",
    "eval_dnf",
    "generate",
    "replicate_seed",
    "AnnealParams",
    "FittedLogicModel",
    "ImportanceReport",
    "Leaf",
    "Op",
    "DnfSizeError",
    "anneal_fit",
    "ensemble_fit",
    "eval_tree",
    "propose_move",
    "to_dnf",
    "tree_score",
    "dnf_to_string",
    "ExperimentConfig",
    "SuccessHistogram",
    "DensityStudyResult",
    "ComboGrid",
    "run_density_study",
    "run_success_study",
    "run_combo_grid",
    "run_pipeline_study",
    "RawTable",
    "TableParseError",
    "load_table",
    "impute",
    "drop_uninformative",
    "to_dataset",
    "raster_export",
    "write_dataset_csv",
]
