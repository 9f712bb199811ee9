"""Feature computation and labeled ranking-dataset construction."""

from .features import (
    FEATURE_NAMES,
    FeatureContext,
    FeatureVector,
    co_change_count,
    compute_feature_vector,
    jaccard_similarity,
    path_similarity,
)
from .correlation import FeatureSchema, prune_correlated_features, spearman_correlation
from .builder import (
    Candidate,
    DatasetSplit,
    RankingList,
    WindowConfig,
    build_dataset,
    split_train_test,
)
from .io import (
    dataset_rows,
    lists_from_rows,
    write_dataset,
    read_dataset,
    write_ltr_text,
)
from .planted import planted_dataset

__all__ = [
    "FEATURE_NAMES",
    "FeatureContext",
    "FeatureVector",
    "co_change_count",
    "compute_feature_vector",
    "jaccard_similarity",
    "path_similarity",
    "FeatureSchema",
    "prune_correlated_features",
    "spearman_correlation",
    "Candidate",
    "DatasetSplit",
    "RankingList",
    "WindowConfig",
    "build_dataset",
    "split_train_test",
    "dataset_rows",
    "lists_from_rows",
    "write_dataset",
    "read_dataset",
    "write_ltr_text",
    "planted_dataset",
]
