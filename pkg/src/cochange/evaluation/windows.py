"""Train/test window grid: every (train-label-days, test-label-days) cell is
attempted; infeasible cells are reported as skipped, never zero-scored."""

import logging

from dataclasses import dataclass, field

from ..dataset import split_train_test
from ..errors import InsufficientHistoryError
from .metrics import DEFAULT_K_VALUES, EvalReport, evaluate
from .stats import wilcoxon_signed_rank

logger = logging.getLogger(__name__)

DEFAULT_TRAIN_DAYS = (30, 90, 180)
DEFAULT_TEST_DAYS = (5, 10, 20, 30, 60, 90, 120, 150, 180, 270)


@dataclass
class GridCell:
    train_days: int
    test_days: int
    status: str  # "ok" | "skipped"
    reason: str | None = None
    report: EvalReport | None = None
    train_lists: int = 0
    test_lists: int = 0

    def as_dict(self) -> dict:
        return {
            "train_days": self.train_days,
            "test_days": self.test_days,
            "status": self.status,
            "reason": self.reason,
            "train_lists": self.train_lists,
            "test_lists": self.test_lists,
            "report": self.report.as_dict() if self.report else None,
        }


@dataclass
class WindowGrid:
    cells: list[GridCell]
    comparisons: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "cells": [c.as_dict() for c in self.cells],
            "comparisons": self.comparisons,
        }


def window_experiment(artifacts, config, train_days=DEFAULT_TRAIN_DAYS,
                      test_days=DEFAULT_TEST_DAYS, k_values=DEFAULT_K_VALUES,
                      blocking: bool = False) -> WindowGrid:
    from ..models import train  # deferred: models depends on evaluation.metrics

    cells: list[GridCell] = []
    for train_d in train_days:
        for test_d in test_days:
            cell = GridCell(train_days=train_d, test_days=test_d, status="skipped")
            try:
                split = split_train_test(
                    artifacts, artifacts.last_commit, train_d, test_d, blocking=blocking
                )
            except InsufficientHistoryError as exc:
                cell.reason = f"insufficient history: {exc}"
                cells.append(cell)
                continue
            cell.train_lists = len(split.train)
            cell.test_lists = len(split.test)
            if not split.train:
                cell.reason = "no training data"
                cells.append(cell)
                continue
            if not split.test:
                cell.reason = "no test data"
                cells.append(cell)
                continue
            model = train(split.train, config)
            cell.report = evaluate(
                model, split.test, k_values=k_values,
                dataset_descriptor=f"train={train_d}d test={test_d}d",
            )
            cell.status = "ok"
            cell.reason = None
            cells.append(cell)
            logger.info(
                "grid cell train=%dd test=%dd: NDCG@5 mean %.4f over %d queries",
                train_d, test_d, cell.report.mean.get(5, float("nan")), cell.test_lists,
            )

    comparisons = _train_setting_comparisons(cells, train_days)
    return WindowGrid(cells=cells, comparisons=comparisons)


def _train_setting_comparisons(cells: list[GridCell], train_days) -> list[dict]:
    """Pairwise Wilcoxon between training-period settings over paired
    per-query NDCG@5, pooled across the test windows both settings completed.
    Test datasets for one test window are identical across train settings, so
    queries pair exactly."""
    by_setting: dict[int, dict[int, GridCell]] = {}
    for cell in cells:
        if cell.status == "ok":
            by_setting.setdefault(cell.train_days, {})[cell.test_days] = cell

    comparisons = []
    ordered = [d for d in train_days if d in by_setting]
    for i, a in enumerate(ordered):
        for b in ordered[i + 1:]:
            k_ref = None
            paired_a: list[float] = []
            paired_b: list[float] = []
            for test_d, cell_a in sorted(by_setting[a].items()):
                cell_b = by_setting[b].get(test_d)
                if cell_b is None:
                    continue
                if k_ref is None:
                    k_values = cell_a.report.k_values
                    k_ref = 5 if 5 in k_values else k_values[0]
                scores_a = {q["query"]: q["ndcg"][k_ref] for q in cell_a.report.per_query}
                scores_b = {q["query"]: q["ndcg"][k_ref] for q in cell_b.report.per_query}
                for query in sorted(set(scores_a) & set(scores_b)):
                    paired_a.append(scores_a[query])
                    paired_b.append(scores_b[query])
            if not paired_a:
                continue
            result = wilcoxon_signed_rank(paired_a, paired_b)
            comparisons.append(
                {
                    "train_days_a": a,
                    "train_days_b": b,
                    "ndcg_k": k_ref,
                    "n_pairs": len(paired_a),
                    "mean_ndcg_a": sum(paired_a) / len(paired_a),
                    "mean_ndcg_b": sum(paired_b) / len(paired_b),
                    "statistic": result.statistic,
                    "p_value": result.p_value,
                    "method": result.method,
                }
            )
    return comparisons
