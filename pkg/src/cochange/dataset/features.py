"""The ten pairwise features describing a (query, candidate) method pair.

Historical features (co-change count, author similarity) are computed from
events inside the feature period only; static features come from the
snapshot taken at the end of that period.
"""

from collections import Counter
from dataclasses import dataclass
from datetime import datetime

from ..analysis import MethodRecord, Snapshot
from ..errors import CochangeError
from ..mining import ChangeSet, MethodEditHistory

FEATURE_NAMES = (
    "co_change_count",
    "author_similarity",
    "semantic_similarity",
    "path_similarity",
    "code_dependency",
    "hierarchy_similarity",
    "clone_similarity",
    "package_similarity",
    "arg_type_similarity",
    "arg_name_similarity",
)


@dataclass(frozen=True)
class FeatureVector:
    co_change_count: int
    author_similarity: float
    semantic_similarity: float
    path_similarity: float
    code_dependency: int
    hierarchy_similarity: bool
    clone_similarity: float
    package_similarity: float
    arg_type_similarity: float
    arg_name_similarity: float

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


def _token_overlap(tokens1: list[str], tokens2: list[str]) -> float:
    """Multiset-common tokens over the longer token sequence."""
    longest = max(len(tokens1), len(tokens2))
    if longest == 0:
        return 1.0
    common = sum((Counter(tokens1) & Counter(tokens2)).values())
    return common / longest


def path_similarity(p1: str, p2: str) -> float:
    """Common '/'-separated tokens divided by the longer path's length."""
    return _token_overlap([t for t in p1.split("/") if t], [t for t in p2.split("/") if t])


def package_similarity(pkg1: str, pkg2: str) -> float:
    return _token_overlap([t for t in pkg1.split(".") if t], [t for t in pkg2.split(".") if t])


def jaccard_similarity(s1, s2) -> float:
    """|intersection| / |union|; two empty sets count as identical (1.0)."""
    s1, s2 = set(s1), set(s2)
    union = s1 | s2
    if not union:
        return 1.0
    return len(s1 & s2) / len(union)


def co_change_count(q: str, c: str, change_sets: list[ChangeSet],
                    start: datetime, end: datetime) -> int:
    """Change sets merged within [start, end) containing both methods."""
    count = 0
    for cs in change_sets:
        if start <= cs.merged_at < end and q in cs.changed_method_ids and c in cs.changed_method_ids:
            count += 1
    return count


class FeatureContext:
    """Shared mined artifacts for one window's feature computation.

    Indexes change sets per method and caches per-method author sets so the
    all-pairs loop stays close to linear in the co-change structure.
    """

    def __init__(self, snapshot: Snapshot, change_sets: list[ChangeSet],
                 histories: dict[str, MethodEditHistory],
                 start: datetime, end: datetime):
        self.snapshot = snapshot
        self.change_sets = change_sets
        self.histories = histories
        self.start = start
        self.end = end
        self._sets_by_method: dict[str, list[ChangeSet]] = {}
        for cs in change_sets:
            if start <= cs.merged_at < end:
                for mid in cs.changed_method_ids:
                    self._sets_by_method.setdefault(mid, []).append(cs)
        self._authors: dict[str, frozenset[str]] = {}

    def co_change_count(self, q: str, c: str) -> int:
        return sum(1 for cs in self._sets_by_method.get(q, ()) if c in cs.changed_method_ids)

    def authors_in_period(self, mid: str) -> frozenset[str]:
        cached = self._authors.get(mid)
        if cached is None:
            history = self.histories.get(mid)
            events = history.events_in(self.start, self.end) if history else []
            cached = frozenset(e.author for e in events)
            self._authors[mid] = cached
        return cached


def compute_feature_vector(q: MethodRecord, c: MethodRecord, context: FeatureContext) -> FeatureVector:
    if q.method_id == c.method_id:
        raise CochangeError("query and candidate must differ")
    snapshot = context.snapshot
    for record in (q, c):
        if record.method_id not in snapshot.methods:
            raise CochangeError(f"method {record.method_id} missing from snapshot")

    return FeatureVector(
        co_change_count=context.co_change_count(q.method_id, c.method_id),
        author_similarity=jaccard_similarity(
            context.authors_in_period(q.method_id), context.authors_in_period(c.method_id)
        ),
        semantic_similarity=snapshot.semantic_similarity(q.method_id, c.method_id),
        path_similarity=path_similarity(q.file_path, c.file_path),
        code_dependency=snapshot.code_dependency(q.method_id, c.method_id),
        hierarchy_similarity=bool(set(q.superclasses) & set(c.superclasses)),
        clone_similarity=snapshot.clone_similarity(q.method_id, c.method_id),
        package_similarity=package_similarity(q.package, c.package),
        arg_type_similarity=jaccard_similarity(q.param_types, c.param_types),
        arg_name_similarity=jaccard_similarity(q.param_names, c.param_names),
    )
