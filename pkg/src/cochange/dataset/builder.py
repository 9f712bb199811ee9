"""Ranking-dataset construction over a feature window and a label window.

Valid methods are the snapshot's non-test methods with at least one edit in
the feature period. Every valid method queries every other valid method;
lists whose labels are all zero are excluded, and candidate order is
lexicographic by method id so output is canonical regardless of input order.
"""

import logging

from dataclasses import dataclass, field
from datetime import datetime, timedelta

from ..analysis import Snapshot
from ..errors import InsufficientHistoryError
from ..mining import ChangeSet, MethodEditHistory
from .features import FeatureContext, compute_feature_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowConfig:
    t_s: datetime  # repository creation
    t_d: datetime  # feature end / labelling start
    t_e: datetime  # labelling end

    def __post_init__(self):
        if not (self.t_s < self.t_d < self.t_e):
            raise ValueError(f"window must satisfy t_s < t_d < t_e, got {self}")


@dataclass(frozen=True)
class Candidate:
    id: str
    features: dict
    label: int


@dataclass
class RankingList:
    query: str
    window: WindowConfig
    candidates: list[Candidate] = field(default_factory=list)

    def labels_by_id(self) -> dict[str, int]:
        return {c.id: c.label for c in self.candidates}

    def max_label(self) -> int:
        return max((c.label for c in self.candidates), default=0)


@dataclass
class DatasetSplit:
    train: list[RankingList]
    test: list[RankingList]
    train_window: WindowConfig
    test_window: WindowConfig

    def __post_init__(self):
        # Label periods are [t_d, t_e); they must not overlap.
        overlap = (self.train_window.t_d < self.test_window.t_e
                   and self.test_window.t_d < self.train_window.t_e)
        if overlap:
            raise ValueError("train and test label periods overlap")


def valid_method_ids(snapshot: Snapshot, histories: dict[str, MethodEditHistory],
                     t_s: datetime, t_d: datetime) -> list[str]:
    valid = []
    for mid in sorted(snapshot.methods):
        record = snapshot.methods[mid]
        if record.is_test:
            continue
        history = histories.get(mid)
        if history is None or not history.events_in(t_s, t_d):
            continue
        valid.append(mid)
    return valid


def build_dataset(snapshot: Snapshot, histories: dict[str, MethodEditHistory],
                  change_sets: list[ChangeSet], window: WindowConfig,
                  blocking: bool = False) -> list[RankingList]:
    valid = valid_method_ids(snapshot, histories, window.t_s, window.t_d)
    if not valid:
        logger.warning(
            "no valid methods: %d in snapshot, all test methods or without edit history in window",
            len(snapshot.methods),
        )
        return []

    feature_ctx = FeatureContext(snapshot, change_sets, histories, window.t_s, window.t_d)
    label_ctx = FeatureContext(snapshot, change_sets, histories, window.t_d, window.t_e)

    lists: list[RankingList] = []
    excluded_all_zero = 0
    for query in valid:
        q_record = snapshot.methods[query]
        candidate_ids = [c for c in valid if c != query]
        if blocking:
            candidate_ids = [c for c in candidate_ids if _blocked_in(feature_ctx, q_record, snapshot.methods[c])]
        candidates = []
        for cid in candidate_ids:
            features = compute_feature_vector(q_record, snapshot.methods[cid], feature_ctx)
            label = label_ctx.co_change_count(query, cid)
            candidates.append(Candidate(id=cid, features=features.as_dict(), label=label))
        rlist = RankingList(query=query, window=window, candidates=candidates)
        if rlist.max_label() > 0:
            lists.append(rlist)
        else:
            excluded_all_zero += 1

    logger.info(
        "built %d ranking lists (%d queries with all-zero labels excluded)",
        len(lists), excluded_all_zero,
    )
    return lists


def _blocked_in(ctx: FeatureContext, q, c) -> bool:
    """Blocking pre-filter: keep candidates sharing a change set, a directory
    token, or a call edge with the query (performance flag, off by default)."""
    if ctx.co_change_count(q.method_id, c.method_id) > 0:
        return True
    if ctx.snapshot.code_dependency(q.method_id, c.method_id) > 0:
        return True
    q_dirs = set(q.file_path.split("/")[:-1])
    c_dirs = set(c.file_path.split("/")[:-1])
    return bool(q_dirs & c_dirs)


def split_train_test(artifacts, last_commit: datetime,
                     train_label_days: int = 180, test_label_days: int = 180,
                     blocking: bool = False) -> DatasetSplit:
    """Figure-3-style split: both windows share t_s (repository creation);
    the train label period ends where the test feature period ends.

    `artifacts` provides repo_creation, histories, change_sets and
    snapshot_at(t_d).
    """
    t_s = artifacts.repo_creation
    span_needed = timedelta(days=train_label_days + test_label_days)
    train_t_d = last_commit - span_needed
    test_t_d = last_commit - timedelta(days=test_label_days)
    if train_t_d <= t_s:
        raise InsufficientHistoryError(
            f"history too short: need more than {train_label_days + test_label_days} days "
            f"before {last_commit.date()}, repository starts {t_s.date()}"
        )

    train_window = WindowConfig(t_s=t_s, t_d=train_t_d, t_e=train_t_d + timedelta(days=train_label_days))
    test_window = WindowConfig(t_s=t_s, t_d=test_t_d, t_e=last_commit)

    train = build_dataset(artifacts.snapshot_at(train_window.t_d), artifacts.histories,
                          artifacts.change_sets, train_window, blocking=blocking)
    test = build_dataset(artifacts.snapshot_at(test_window.t_d), artifacts.histories,
                         artifacts.change_sets, test_window, blocking=blocking)
    return DatasetSplit(train=train, test=test, train_window=train_window, test_window=test_window)
