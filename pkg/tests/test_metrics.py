"""NDCG metrics and evaluation aggregation."""

import math

import pytest

from datetime import datetime, timedelta, timezone

from cochange.dataset.builder import Candidate, RankingList, WindowConfig
from cochange.errors import CochangeError
from cochange.evaluation import (
    OracleScorer,
    aggregate_projects,
    dcg_at_k,
    evaluate,
    ndcg_at_k,
    rank_by_scores,
)

BASE = datetime(2024, 1, 1, tzinfo=timezone.utc)
WINDOW = WindowConfig(BASE, BASE + timedelta(days=1), BASE + timedelta(days=2))


def make_list(query, labels: dict[str, int]):
    candidates = [Candidate(id=cid, features={"co_change_count": 0, "clone_similarity": 0.0},
                            label=lab) for cid, lab in labels.items()]
    return RankingList(query=query, window=WINDOW, candidates=candidates)


def dcg_oracle(rels, k):
    """Straight transcription of the gain/discount sum."""
    return sum((2 ** r - 1) / math.log2(i + 2) for i, r in enumerate(rels[:k]))


class TestDcg:
    def test_worked_example(self):
        assert dcg_at_k([1, 1, 0], 3) == pytest.approx(1.6309, abs=1e-4)

    def test_all_zeros(self):
        assert dcg_at_k([0, 0, 0], 3) == 0.0

    def test_single_item(self):
        assert dcg_at_k([2], 1) == pytest.approx(3.0)

    def test_matches_oracle_on_random_inputs(self):
        import random

        rng = random.Random(5)
        for _ in range(100):
            rels = [rng.randint(0, 6) for _ in range(rng.randint(1, 12))]
            k = rng.randint(1, 15)
            assert dcg_at_k(rels, k) == pytest.approx(dcg_oracle(rels, k))

    def test_non_decreasing_in_k(self):
        rels = [3, 0, 2, 1, 0, 4]
        values = [dcg_at_k(rels, k) for k in range(1, 10)]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))

    def test_gain_cap_guards_overflow(self):
        assert dcg_at_k([4000], 1) == pytest.approx(2 ** 30 - 1)


class TestNdcg:
    def test_worked_fixture(self):
        labels = {"a": 2, "b": 1, "c": 1, "d": 0}
        assert ndcg_at_k(["b", "c", "d", "a"], labels, 3) == pytest.approx(0.3948, abs=1e-4)

    def test_ideal_order_is_one(self):
        labels = {"a": 5, "b": 3, "c": 1, "d": 0}
        assert ndcg_at_k(["a", "b", "c", "d"], labels, 4) == pytest.approx(1.0)

    def test_ideal_is_exactly_one_for_any_positive_multiset(self):
        import random

        rng = random.Random(8)
        for _ in range(50):
            labels = {f"c{i}": rng.randint(0, 4) for i in range(rng.randint(2, 10))}
            if not any(labels.values()):
                labels["c0"] = 1
            ideal = [cid for cid, _ in sorted(labels.items(), key=lambda p: (-p[1], p[0]))]
            k = rng.randint(1, len(labels))
            assert ndcg_at_k(ideal, labels, k) == 1.0

    def test_top1_with_max_label_first(self):
        labels = {"a": 3, "b": 1, "c": 0}
        assert ndcg_at_k(["a", "c", "b"], labels, 1) == 1.0

    def test_all_zero_labels_rejected(self):
        with pytest.raises(CochangeError):
            ndcg_at_k(["a", "b"], {"a": 0, "b": 0}, 1)

    def test_bounded(self):
        import random

        rng = random.Random(9)
        for _ in range(50):
            ids = [f"c{i}" for i in range(6)]
            labels = {cid: rng.randint(0, 3) for cid in ids}
            labels[ids[0]] = max(labels[ids[0]], 1)
            order = ids[:]
            rng.shuffle(order)
            v = ndcg_at_k(order, labels, rng.randint(1, 6))
            assert 0.0 <= v <= 1.0


class TestRankByScores:
    def test_descending_with_id_tiebreak(self):
        assert rank_by_scores(["a", "b", "c"], [0.9, 0.5, 0.9]) == ["a", "c", "b"]


class TestEvaluate:
    def test_mean_and_median(self):
        lists = [make_list("q1", {"a": 1, "b": 0}), make_list("q2", {"a": 0, "b": 2})]

        class HalfScorer:
            def rank_lists(self, ls):
                # perfect on q1, inverted on q2
                return [["a", "b"], ["a", "b"]]

        report = evaluate(HalfScorer(), lists, k_values=(1, 5))
        assert report.mean[1] == pytest.approx(0.5)
        assert report.median[1] == pytest.approx(0.5)
        assert report.per_query[0]["ndcg"][1] == 1.0
        assert report.per_query[1]["ndcg"][1] == 0.0

    def test_single_query_mean_equals_median(self):
        lists = [make_list("q1", {"a": 2, "b": 1})]
        report = evaluate(OracleScorer(), lists, k_values=(1, 3))
        assert report.mean[1] == report.median[1] == 1.0

    def test_oracle_scores_one_everywhere(self, artifacts):
        from fixture_repo import day
        from cochange.dataset import WindowConfig, build_dataset

        window = WindowConfig(day(0), day(270), day(450))
        dataset = build_dataset(artifacts.snapshot_at(day(270)), artifacts.histories,
                                artifacts.change_sets, window)
        report = evaluate(OracleScorer(), dataset)
        for q in report.per_query:
            assert all(v == pytest.approx(1.0) for v in q["ndcg"].values())

    def test_mean_matches_per_query_values(self):
        lists = [make_list(f"q{i}", {"a": i % 3, "b": 1}) for i in range(5)]
        report = evaluate(OracleScorer(), lists, k_values=(3,))
        values = report.ndcg_values(3)
        assert report.mean[3] == pytest.approx(sum(values) / len(values))

    def test_empty_dataset_rejected(self):
        with pytest.raises(CochangeError):
            evaluate(OracleScorer(), [])

    def test_aggregate_projects(self):
        lists_a = [make_list("q1", {"a": 1, "b": 0})]
        lists_b = [make_list("q2", {"a": 2, "b": 1})]
        r1 = evaluate(OracleScorer(), lists_a, k_values=(5,))
        r2 = evaluate(OracleScorer(), lists_b, k_values=(5,))
        agg = aggregate_projects([r1, r2])
        assert agg["mean"]["5"] == pytest.approx(1.0)
        assert agg["median"]["5"] == pytest.approx(1.0)
