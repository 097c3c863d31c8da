"""Evaluation harness: metrics, statistics and baseline/ablation runners."""

from .ablation import AblationResult, run_ablation, run_ablation_suite
from .baseline import (
    BASELINE_MODES,
    BaselineResult,
    BaselineSample,
    examples_block,
    parse_class_number,
    run_llm_baseline,
)
from .metrics import (
    DEFAULT_NUM_CLASSES,
    MetricReport,
    compute_metrics,
    confusion_from_predictions,
    topk_hits,
)
from .stats import (
    LIKERT_DIMENSIONS,
    LikertCell,
    LikertDataset,
    LikertSummary,
    MannWhitneyResult,
    PairComparison,
    ShapiroResult,
    likert_summary,
    mann_whitney_u,
    shapiro_wilk,
)

__all__ = [
    "AblationResult",
    "BASELINE_MODES",
    "BaselineResult",
    "BaselineSample",
    "DEFAULT_NUM_CLASSES",
    "LIKERT_DIMENSIONS",
    "LikertCell",
    "LikertDataset",
    "LikertSummary",
    "MannWhitneyResult",
    "MetricReport",
    "PairComparison",
    "ShapiroResult",
    "compute_metrics",
    "confusion_from_predictions",
    "examples_block",
    "likert_summary",
    "mann_whitney_u",
    "parse_class_number",
    "run_ablation",
    "run_ablation_suite",
    "run_llm_baseline",
    "shapiro_wilk",
    "topk_hits",
]
