"""Wilcoxon signed-rank test with exact small-sample p-values.

Zero differences are dropped, |differences| are ranked with average ranks,
and W = min(W+, W-). For n <= 25 the two-sided p is exact: the null
distribution is enumerated by a subset-sum count over doubled ranks, which
equals brute-force enumeration of all 2^n sign assignments. Larger samples
use the normal approximation with tie and continuity corrections.
"""

import math

from dataclasses import dataclass

from ..dataset.correlation import average_ranks

EXACT_LIMIT = 25


@dataclass(frozen=True)
class SignificanceResult:
    statistic: float  # W = min(W+, W-)
    n_effective: int
    p_value: float
    method: str  # "exact" | "normal-approximation"


def wilcoxon_signed_rank(paired_a: list[float], paired_b: list[float]) -> SignificanceResult:
    if len(paired_a) != len(paired_b):
        raise ValueError("paired samples must have equal length")
    if not paired_a:
        raise ValueError("need at least one pair")

    diffs = [a - b for a, b in zip(paired_a, paired_b) if a != b]
    n = len(diffs)
    if n == 0:
        return SignificanceResult(statistic=0.0, n_effective=0, p_value=1.0, method="exact")

    ranks = average_ranks([abs(d) for d in diffs])
    w_plus = sum(r for r, d in zip(ranks, diffs) if d > 0)
    w_minus = sum(r for r, d in zip(ranks, diffs) if d < 0)
    w = min(w_plus, w_minus)

    if n <= EXACT_LIMIT:
        p = _exact_two_sided(ranks, w)
        return SignificanceResult(statistic=w, n_effective=n, p_value=p, method="exact")

    p = _normal_two_sided(ranks, w, n)
    return SignificanceResult(statistic=w, n_effective=n, p_value=p, method="normal-approximation")


def _exact_two_sided(ranks: list[float], w: float) -> float:
    """P(min(W+, W-) <= w) under the symmetric null.

    Average ranks are multiples of 0.5, so doubling makes every rank an
    integer and the count of sign assignments per W+ value is a subset-sum
    convolution.
    """
    doubled = [int(round(2 * r)) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        for v in range(total - r, -1, -1):
            if counts[v]:
                counts[v + r] += counts[v]
    w2 = int(round(2 * w))
    favorable = sum(
        c for v, c in enumerate(counts) if v <= w2 or (total - v) <= w2
    )
    return favorable / float(2 ** len(ranks))


def _normal_two_sided(ranks: list[float], w: float, n: int) -> float:
    mean = n * (n + 1) / 4.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0
    # tie correction: group sizes of equal |d| ranks
    groups: dict[float, int] = {}
    for r in ranks:
        groups[r] = groups.get(r, 0) + 1
    variance -= sum(t ** 3 - t for t in groups.values()) / 48.0
    if variance <= 0:
        return 1.0
    z = (w - mean + 0.5) / math.sqrt(variance)  # continuity correction toward the mean
    p = math.erfc(-z / math.sqrt(2.0))  # = 2 * Phi(z)
    return min(1.0, p)
