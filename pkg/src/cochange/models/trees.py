"""Regression trees (variance-reduction CART), bagged forests and gradient
boosting on squared loss.

Trees are plain nested dicts — {"feature", "threshold", "left", "right"} or
{"leaf": value} — identical to their serialized form. Splits scan every
boundary between observed feature values with prefix sums, thresholds are
midpoints, and tie-breaking is first-feature/first-threshold so a fit is a
pure function of (data, seed).
"""

import heapq
import math

import numpy as np

_MIN_GAIN = 1e-12


def _best_split(X: np.ndarray, y: np.ndarray, feature_cols, min_leaf: int):
    """Best (gain, column, threshold) over the candidate columns, or None."""
    n = len(y)
    if n < 2 * min_leaf:
        return None
    total_sum = float(y.sum())
    total_sq = float((y * y).sum())
    parent_sse = total_sq - total_sum * total_sum / n
    if parent_sse <= _MIN_GAIN:
        return None

    best = None
    sizes = np.arange(1, n, dtype=np.float64)
    for col in feature_cols:
        order = np.argsort(X[:, col], kind="stable")
        xs = X[order, col]
        ys = y[order]
        boundary = xs[:-1] != xs[1:]
        if min_leaf > 1:
            k = np.arange(1, n)
            boundary = boundary & (k >= min_leaf) & ((n - k) >= min_leaf)
        if not boundary.any():
            continue
        csum = np.cumsum(ys)[:-1]
        csq = np.cumsum(ys * ys)[:-1]
        sse_left = csq - csum * csum / sizes
        right_sum = total_sum - csum
        sse_right = (total_sq - csq) - right_sum * right_sum / (n - sizes)
        total = np.where(boundary, sse_left + sse_right, np.inf)
        i = int(np.argmin(total))
        gain = parent_sse - float(total[i])
        if gain > _MIN_GAIN and (best is None or gain > best[0]):
            best = (gain, col, float((xs[i] + xs[i + 1]) / 2.0))
    return best


def _sample_columns(n_features: int, feature_fraction, rng) -> list[int]:
    if feature_fraction is None or rng is None:
        return list(range(n_features))
    if feature_fraction == "sqrt":
        m = max(1, math.ceil(math.sqrt(n_features)))
    else:
        m = max(1, math.ceil(float(feature_fraction) * n_features))
    m = min(m, n_features)
    return sorted(int(c) for c in rng.choice(n_features, size=m, replace=False))


def fit_tree(X: np.ndarray, y: np.ndarray, feature_names, min_leaf: int = 1,
             feature_fraction=None, rng=None, max_leaves: int | None = None) -> dict:
    """Fit one regression tree. `max_leaves` switches to best-first growth
    (used by boosting); otherwise nodes expand until pure or too small."""
    if max_leaves is not None:
        return _fit_best_first(X, y, feature_names, min_leaf, feature_fraction, rng, max_leaves)

    root: dict = {}
    stack = [(root, np.arange(len(y)))]
    while stack:
        node, idx = stack.pop()
        sub_y = y[idx]
        cols = _sample_columns(X.shape[1], feature_fraction, rng)
        split = _best_split(X[idx], sub_y, cols, min_leaf)
        if split is None:
            node["leaf"] = float(sub_y.mean())
            continue
        _, col, threshold = split
        mask = X[idx, col] <= threshold
        node["feature"] = feature_names[col]
        node["threshold"] = threshold
        node["left"] = {}
        node["right"] = {}
        # push right first so the left subtree expands first (stable order)
        stack.append((node["right"], idx[~mask]))
        stack.append((node["left"], idx[mask]))
    return root


def _fit_best_first(X, y, feature_names, min_leaf, feature_fraction, rng, max_leaves):
    root: dict = {"leaf": float(y.mean())}
    counter = 0
    heap: list = []

    def propose(node, idx):
        nonlocal counter
        cols = _sample_columns(X.shape[1], feature_fraction, rng)
        split = _best_split(X[idx], y[idx], cols, min_leaf)
        if split is not None:
            gain, col, threshold = split
            heapq.heappush(heap, (-gain, counter, node, idx, col, threshold))
            counter += 1

    propose(root, np.arange(len(y)))
    leaves = 1
    while heap and leaves < max_leaves:
        _, _, node, idx, col, threshold = heapq.heappop(heap)
        mask = X[idx, col] <= threshold
        left_idx, right_idx = idx[mask], idx[~mask]
        node.pop("leaf", None)
        node["feature"] = feature_names[col]
        node["threshold"] = threshold
        node["left"] = {"leaf": float(y[left_idx].mean())}
        node["right"] = {"leaf": float(y[right_idx].mean())}
        leaves += 1
        propose(node["left"], left_idx)
        propose(node["right"], right_idx)
    return root


def compile_tree(tree: dict, name_to_col: dict[str, int]):
    """Flatten a nested tree into arrays for batched prediction."""
    feats, thresholds, lefts, rights, values = [], [], [], [], []

    def add(node) -> int:
        i = len(feats)
        feats.append(-1)
        thresholds.append(0.0)
        lefts.append(-1)
        rights.append(-1)
        values.append(0.0)
        if "leaf" in node:
            values[i] = float(node["leaf"])
        else:
            feats[i] = name_to_col[node["feature"]]
            thresholds[i] = float(node["threshold"])
            lefts[i] = add(node["left"])
            rights[i] = add(node["right"])
        return i

    add(tree)
    return (
        np.asarray(feats, dtype=np.int64),
        np.asarray(thresholds, dtype=np.float64),
        np.asarray(lefts, dtype=np.int64),
        np.asarray(rights, dtype=np.int64),
        np.asarray(values, dtype=np.float64),
    )


def predict_compiled(compiled, X: np.ndarray) -> np.ndarray:
    feats, thresholds, lefts, rights, values = compiled
    node = np.zeros(len(X), dtype=np.int64)
    while True:
        f = feats[node]
        internal = f >= 0
        if not internal.any():
            break
        rows = np.nonzero(internal)[0]
        cur = node[rows]
        go_left = X[rows, feats[cur]] <= thresholds[cur]
        node[rows] = np.where(go_left, lefts[cur], rights[cur])
    return values[node]


def predict_tree(tree: dict, X: np.ndarray, name_to_col: dict[str, int]) -> np.ndarray:
    return predict_compiled(compile_tree(tree, name_to_col), X)


def fit_forest(X, y, feature_names, num_trees, min_leaf, feature_fraction, bag_fraction, rng_seed):
    """Bagged trees with per-split feature subsampling; tree i draws from its
    own stream (seed = rng_seed XOR i) so results are schedule independent."""
    n = len(y)
    trees = []
    for i in range(num_trees):
        rng = np.random.default_rng(rng_seed ^ i)
        bag_size = max(1, int(round(bag_fraction * n)))
        idx = rng.integers(0, n, size=bag_size)
        trees.append(fit_tree(X[idx], y[idx], feature_names, min_leaf=min_leaf,
                              feature_fraction=feature_fraction, rng=rng))
    return trees


def fit_mart(X, y, feature_names, num_trees, learning_rate, max_leaves):
    """Squared-loss boosting: each tree fits the current residuals and is
    blended in at the learning rate; training loss is non-increasing."""
    base = float(y.mean())
    predictions = np.full(len(y), base)
    trees = []
    name_to_col = {n: i for i, n in enumerate(feature_names)}
    for _ in range(num_trees):
        residuals = y - predictions
        tree = fit_tree(X, residuals, feature_names, min_leaf=1, max_leaves=max_leaves)
        trees.append(tree)
        predictions = predictions + learning_rate * predict_tree(tree, X, name_to_col)
    return base, trees
