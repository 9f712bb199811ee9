"""Synthetic planted-signal datasets for end-to-end validation.

Methods are grouped into coupled clusters. Within a cluster every pair
shares a feature-period co-change count, so the count separates coupled
candidates from the rest; the pair's author similarity then decides how
strongly the pair keeps co-changing in the label period. A ranker that uses
only the count ties inside clusters, while one that also reads author
similarity orders them correctly.
"""

import numpy as np

from datetime import datetime, timedelta, timezone

from .builder import Candidate, RankingList, WindowConfig
from .features import FEATURE_NAMES


def _pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def planted_dataset(n_clusters: int = 50, cluster_size: int = 3, n_noise: int = 30,
                    seed: int = 7) -> tuple[list[RankingList], list[RankingList]]:
    """(train_lists, test_lists) with the same coupling structure and fresh
    noise per split."""
    rng = np.random.default_rng(seed)
    base = datetime(2024, 1, 1, tzinfo=timezone.utc)
    train_window = WindowConfig(base, base + timedelta(days=180), base + timedelta(days=360))
    test_window = WindowConfig(base, base + timedelta(days=360), base + timedelta(days=540))

    methods = [f"m{i:04d}" for i in range(n_clusters * cluster_size + n_noise)]
    cluster_of = {m: (i // cluster_size if i < n_clusters * cluster_size else -1)
                  for i, m in enumerate(methods)}

    # pair-level coupling parameters, fixed across both splits
    author_sim: dict[tuple[str, str], float] = {}
    members_by_cluster: dict[int, list[str]] = {}
    for m, cl in cluster_of.items():
        if cl >= 0:
            members_by_cluster.setdefault(cl, []).append(m)
    for members in members_by_cluster.values():
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                # alternate strong/weak collaboration inside each cluster
                author_sim[_pair_key(a, b)] = 0.9 if rng.random() < 0.5 else 0.2

    def make_split(window: WindowConfig, split_rng) -> list[RankingList]:
        counts: dict[tuple[str, str], int] = {}
        labels: dict[tuple[str, str], int] = {}
        for key, sim in author_sim.items():
            count = 3 + int(split_rng.poisson(1.5))
            counts[key] = count
            labels[key] = count + 3 if sim > 0.5 else max(1, count - 2)

        lists = []
        for query in methods:
            if cluster_of[query] < 0:
                continue  # noise methods never co-change: all-zero lists are excluded
            candidates = []
            for cand in methods:
                if cand == query:
                    continue
                key = _pair_key(query, cand)
                count = counts.get(key, 0)
                if count == 0 and split_rng.random() < 0.03:
                    count = 1  # sporadic unrelated co-change, never repeated
                # full-range noise outside clusters: author overlap alone
                # cannot tell coupled pairs apart, only order them
                sim = author_sim.get(key, float(split_rng.uniform(0.0, 1.0)))
                features = {
                    "co_change_count": count,
                    "author_similarity": sim,
                    "semantic_similarity": float(split_rng.uniform(-0.2, 0.8)),
                    "path_similarity": float(split_rng.uniform(0.0, 1.0)),
                    "code_dependency": int(split_rng.integers(0, 3)),
                    "hierarchy_similarity": bool(split_rng.random() < 0.2),
                    "clone_similarity": float(split_rng.choice([0.0, 0.0, 0.0, 80.0])),
                    "package_similarity": float(split_rng.uniform(0.0, 1.0)),
                    "arg_type_similarity": float(split_rng.uniform(0.0, 1.0)),
                    "arg_name_similarity": float(split_rng.uniform(0.0, 1.0)),
                }
                assert set(features) == set(FEATURE_NAMES)
                candidates.append(Candidate(id=cand, features=features, label=labels.get(key, 0)))
            lists.append(RankingList(query=query, window=window, candidates=candidates))
        return lists

    train = make_split(train_window, np.random.default_rng(seed + 1))
    test = make_split(test_window, np.random.default_rng(seed + 2))
    return train, test
