"""Ranking quality: DCG@k / NDCG@k and per-project aggregation."""

import logging
import math
import statistics

from dataclasses import dataclass

from ..dataset import RankingList
from ..errors import CochangeError

logger = logging.getLogger(__name__)

DEFAULT_K_VALUES = (1, 3, 5, 10)

# Gains are 2^rel - 1; co-change counts are small in practice, but a cap
# keeps pathological labels from overflowing. Triggering it is reported.
GAIN_EXPONENT_CAP = 30

_cap_reported = False


def _gain(rel: int) -> float:
    global _cap_reported
    if rel > GAIN_EXPONENT_CAP:
        if not _cap_reported:
            logger.warning(
                "relevance %d exceeds the gain exponent cap (%d); capping", rel, GAIN_EXPONENT_CAP
            )
            _cap_reported = True
        rel = GAIN_EXPONENT_CAP
    return float(2 ** rel - 1)


def dcg_at_k(relevances: list[int], k: int) -> float:
    """Sum of (2^rel - 1)/log2(i+1) over the first min(k, n) positions."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return sum(
        _gain(rel) / math.log2(i + 1)
        for i, rel in enumerate(relevances[:k], start=1)
    )


def ndcg_at_k(predicted_order: list[str], labels: dict[str, int], k: int) -> float:
    """DCG of the predicted order over the ideal (label-descending) DCG."""
    ideal = sorted(labels.values(), reverse=True)
    idcg = dcg_at_k(ideal, k)
    if idcg == 0.0:
        raise CochangeError(
            "NDCG is undefined for all-zero labels; such lists are excluded upstream"
        )
    dcg = dcg_at_k([labels[c] for c in predicted_order], k)
    return dcg / idcg


def rank_by_scores(ids: list[str], scores) -> list[str]:
    """Score-descending order with deterministic id-ascending tie-breaks."""
    return [i for i, _ in sorted(zip(ids, scores), key=lambda p: (-p[1], p[0]))]


@dataclass
class EvalReport:
    k_values: tuple[int, ...]
    per_query: list[dict]  # {"query": id, "ndcg": {k: value}}
    mean: dict[int, float]
    median: dict[int, float]
    model_descriptor: str = ""
    dataset_descriptor: str = ""

    def as_dict(self) -> dict:
        return {
            "k_values": list(self.k_values),
            "per_query": [
                {"query": q["query"], "ndcg": {str(k): v for k, v in q["ndcg"].items()}}
                for q in self.per_query
            ],
            "per_project": {
                "mean": {str(k): v for k, v in self.mean.items()},
                "median": {str(k): v for k, v in self.median.items()},
            },
            "model": self.model_descriptor,
            "dataset": self.dataset_descriptor,
        }

    def ndcg_values(self, k: int) -> list[float]:
        return [q["ndcg"][k] for q in self.per_query]


def evaluate(ranker, dataset: list[RankingList], k_values=DEFAULT_K_VALUES,
             model_descriptor: str = "", dataset_descriptor: str = "") -> EvalReport:
    """Rank every list with `ranker` (anything exposing rank_lists), compute
    NDCG per query per k, and aggregate mean and median for the project."""
    if not dataset:
        raise CochangeError("cannot evaluate an empty dataset")
    ordered = sorted(dataset, key=lambda r: r.query)
    rankings = ranker.rank_lists(ordered)
    per_query = []
    for rlist, ranked_ids in zip(ordered, rankings):
        labels = rlist.labels_by_id()
        per_query.append(
            {"query": rlist.query, "ndcg": {k: ndcg_at_k(ranked_ids, labels, k) for k in k_values}}
        )
    mean = {k: statistics.fmean(q["ndcg"][k] for q in per_query) for k in k_values}
    median = {k: statistics.median(q["ndcg"][k] for q in per_query) for k in k_values}
    return EvalReport(
        k_values=tuple(k_values),
        per_query=per_query,
        mean=mean,
        median=median,
        model_descriptor=model_descriptor or getattr(ranker, "descriptor", ranker.__class__.__name__),
        dataset_descriptor=dataset_descriptor,
    )


def aggregate_projects(reports: list[EvalReport]) -> dict:
    """Cross-project aggregation: mean and median of per-project means."""
    if not reports:
        return {"mean": {}, "median": {}}
    k_values = reports[0].k_values
    return {
        "mean": {str(k): statistics.fmean(r.mean[k] for r in reports) for k in k_values},
        "median": {str(k): statistics.median(r.mean[k] for r in reports) for k in k_values},
    }
