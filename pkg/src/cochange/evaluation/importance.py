"""Permutation feature importance: NDCG@5 drop after shuffling one feature
column across all candidates of all lists."""

import numpy as np

from dataclasses import dataclass

from ..dataset import RankingList
from ..errors import CochangeError
from .metrics import evaluate

DEFAULT_REPETITIONS = 5
IMPORTANCE_K = 5


@dataclass
class ImportanceReport:
    baseline_ndcg5: float
    per_feature: list[tuple[str, float]]  # model schema order
    shuffle_seed: int
    repetitions: int

    def ranked(self) -> list[tuple[str, float]]:
        return sorted(self.per_feature, key=lambda item: (-item[1], item[0]))

    def as_dict(self) -> dict:
        return {
            "baseline_ndcg5": self.baseline_ndcg5,
            "per_feature": [{"feature": n, "importance": v} for n, v in self.per_feature],
            "shuffle_seed": self.shuffle_seed,
            "repetitions": self.repetitions,
        }


def _mean_ndcg5(model, dataset) -> float:
    return evaluate(model, dataset, k_values=(IMPORTANCE_K,)).mean[IMPORTANCE_K]


def permutation_importance(model, dataset: list[RankingList], feature: str,
                           seed: int, repetitions: int = DEFAULT_REPETITIONS,
                           baseline: float | None = None) -> float:
    """baseline NDCG@5 minus the mean NDCG@5 over `repetitions` seeded
    whole-dataset shuffles of `feature`."""
    if feature not in model.feature_names:
        raise CochangeError(f"unknown feature {feature!r}; model uses {model.feature_names}")
    if baseline is None:
        baseline = _mean_ndcg5(model, dataset)

    candidates = [c for rlist in dataset for c in rlist.candidates]
    original = [c.features[feature] for c in candidates]
    shuffled_scores = []
    try:
        for rep in range(repetitions):
            rng = np.random.default_rng([seed, rep])
            permutation = rng.permutation(len(candidates))
            for cand, src in zip(candidates, permutation):
                cand.features[feature] = original[src]
            shuffled_scores.append(_mean_ndcg5(model, dataset))
    finally:
        for cand, value in zip(candidates, original):
            cand.features[feature] = value

    return baseline - sum(shuffled_scores) / len(shuffled_scores)


def importance_report(model, dataset: list[RankingList], seed: int,
                      repetitions: int = DEFAULT_REPETITIONS) -> ImportanceReport:
    baseline = _mean_ndcg5(model, dataset)
    per_feature = [
        (name, permutation_importance(model, dataset, name, seed, repetitions, baseline=baseline))
        for name in model.feature_names
    ]
    return ImportanceReport(
        baseline_ndcg5=baseline,
        per_feature=per_feature,
        shuffle_seed=seed,
        repetitions=repetitions,
    )
