"""Spearman correlation analysis and redundant-feature pruning at |rho| > 0.7."""

import logging
import math

from dataclasses import dataclass, field

from .features import FEATURE_NAMES

logger = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.7

# Configured victims for known-redundant pairs: package similarity loses to
# path similarity (path generalizes beyond languages with packages).
DEFAULT_VICTIMS = {
    frozenset(("path_similarity", "package_similarity")): "package_similarity",
}


def average_ranks(values: list[float]) -> list[float]:
    """1-based ranks with ties receiving the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _pearson(x: list[float], y: list[float]) -> float | None:
    n = len(x)
    mx = sum(x) / n
    my = sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        return None
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    r = sxy / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def spearman_correlation(x: list[float], y: list[float]) -> float | None:
    """Pearson correlation of average ranks; None when a side has zero rank
    variance (not computable)."""
    if len(x) != len(y):
        raise ValueError("inputs must have equal length")
    if len(x) < 3:
        raise ValueError("need at least 3 observations")
    return _pearson(average_ranks(list(x)), average_ranks(list(y)))


@dataclass
class FeatureSchema:
    kept: list[str]
    dropped: list[dict] = field(default_factory=list)  # {"name","against","rho"}
    matrix: dict[str, dict[str, float | None]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {"kept": list(self.kept), "dropped": list(self.dropped), "matrix": self.matrix}


def prune_correlated_features(dataset, threshold: float = DEFAULT_THRESHOLD,
                              victims: dict | None = None,
                              feature_names=FEATURE_NAMES) -> FeatureSchema:
    """Greedy pruning: for every pair with |rho| > threshold drop the
    configured victim (default: the later feature in canonical order),
    highest correlations first."""
    victims = DEFAULT_VICTIMS if victims is None else victims
    columns = {name: [] for name in feature_names}
    for rlist in dataset:
        for cand in rlist.candidates:
            for name in feature_names:
                columns[name].append(float(cand.features[name]))

    names = list(feature_names)
    matrix: dict[str, dict[str, float | None]] = {n: {} for n in names}
    flagged = []
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if len(columns[a]) >= 3:
                rho = spearman_correlation(columns[a], columns[b])
            else:
                rho = None
            matrix[a][b] = rho
            matrix[b][a] = rho
            if rho is not None and abs(rho) > threshold:
                flagged.append((a, b, rho))

    flagged.sort(key=lambda item: (-abs(item[2]), item[0], item[1]))
    alive = set(names)
    dropped = []
    for a, b, rho in flagged:
        if a not in alive or b not in alive:
            continue
        victim = victims.get(frozenset((a, b)))
        if victim is None:
            victim = b if names.index(b) > names.index(a) else a
        survivor = a if victim == b else b
        alive.discard(victim)
        dropped.append({"name": victim, "against": survivor, "rho": rho})
        logger.info("pruning %s (|rho|=%.3f with %s)", victim, abs(rho), survivor)

    return FeatureSchema(
        kept=[n for n in names if n in alive],
        dropped=dropped,
        matrix=matrix,
    )
