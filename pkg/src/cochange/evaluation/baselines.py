"""The three reimplemented baseline rankers plus an oracle scorer.

All are pure functions of the ranking list (and, for file proximity, a
method -> file path index): repeated invocation yields identical orderings.
"""

from ..dataset import RankingList


def baseline_support(rlist: RankingList, k: int | None = None) -> list[str]:
    """Rank by historical co-change count, descending; ties by method id."""
    ordered = sorted(rlist.candidates, key=lambda c: (-c.features["co_change_count"], c.id))
    ids = [c.id for c in ordered]
    return ids if k is None else ids[:k]


def _directory_distance(path_a: str, path_b: str) -> int:
    dirs_a = path_a.split("/")[:-1]
    dirs_b = path_b.split("/")[:-1]
    common = 0
    for a, b in zip(dirs_a, dirs_b):
        if a != b:
            break
        common += 1
    return (len(dirs_a) - common) + (len(dirs_b) - common)


def baseline_file_proximity(rlist: RankingList, method_index: dict[str, str],
                            k: int | None = None) -> list[str]:
    """Rank by file-system tree distance ascending; equal distances fall back
    to support ranking, then method id. Methods missing from the index (gone
    from the snapshot the index was built on) sort as maximally distant."""
    query_path = method_index.get(rlist.query, "")

    def sort_key(c):
        path = method_index.get(c.id)
        if path is None:
            distance = 1_000_000
        elif path == query_path:
            distance = 0
        else:
            distance = _directory_distance(query_path, path)
        return (distance, -c.features["co_change_count"], c.id)

    ids = [c.id for c in sorted(rlist.candidates, key=sort_key)]
    return ids if k is None else ids[:k]


def baseline_clone(rlist: RankingList, k: int | None = None) -> list[str]:
    """Rank by clone similarity descending; zero-score candidates keep
    lexicographic order after the nonzero ones."""
    ordered = sorted(rlist.candidates, key=lambda c: (-c.features["clone_similarity"], c.id))
    ids = [c.id for c in ordered]
    return ids if k is None else ids[:k]


class SupportBaseline:
    descriptor = "baseline-support"

    def rank_lists(self, lists: list[RankingList]) -> list[list[str]]:
        return [baseline_support(r) for r in lists]


class FileProximityBaseline:
    descriptor = "baseline-file-proximity"

    def __init__(self, method_index: dict[str, str]):
        self.method_index = method_index

    def rank_lists(self, lists: list[RankingList]) -> list[list[str]]:
        return [baseline_file_proximity(r, self.method_index) for r in lists]


class CloneBaseline:
    descriptor = "baseline-clone"

    def rank_lists(self, lists: list[RankingList]) -> list[list[str]]:
        return [baseline_clone(r) for r in lists]


class OracleScorer:
    """Scores each candidate with its own label: the perfect-ranking probe
    used for pipeline self-checks."""

    descriptor = "oracle"

    def rank_lists(self, lists: list[RankingList]) -> list[list[str]]:
        out = []
        for rlist in lists:
            ordered = sorted(rlist.candidates, key=lambda c: (-c.label, c.id))
            out.append([c.id for c in ordered])
        return out
