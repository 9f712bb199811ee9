"""Metrics, significance testing, baselines, importance, window experiments."""

from .metrics import (
    DEFAULT_K_VALUES,
    EvalReport,
    aggregate_projects,
    dcg_at_k,
    evaluate,
    ndcg_at_k,
    rank_by_scores,
)
from .stats import SignificanceResult, wilcoxon_signed_rank
from .baselines import (
    CloneBaseline,
    FileProximityBaseline,
    OracleScorer,
    SupportBaseline,
    baseline_clone,
    baseline_file_proximity,
    baseline_support,
)
from .importance import ImportanceReport, importance_report, permutation_importance
from .windows import GridCell, WindowGrid, window_experiment

__all__ = [
    "DEFAULT_K_VALUES",
    "EvalReport",
    "aggregate_projects",
    "dcg_at_k",
    "evaluate",
    "ndcg_at_k",
    "rank_by_scores",
    "SignificanceResult",
    "wilcoxon_signed_rank",
    "CloneBaseline",
    "FileProximityBaseline",
    "OracleScorer",
    "SupportBaseline",
    "baseline_clone",
    "baseline_file_proximity",
    "baseline_support",
    "ImportanceReport",
    "importance_report",
    "permutation_importance",
    "GridCell",
    "WindowGrid",
    "window_experiment",
]
