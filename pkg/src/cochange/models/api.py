"""Training, scoring and (de)serialization of the four ranker families."""

import json
import math

import numpy as np

from pathlib import Path

from ..dataset import FEATURE_NAMES, RankingList
from ..errors import CochangeError, FeatureSchemaMismatch, SchemaError
from ..evaluation.metrics import rank_by_scores
from ..storage import canonical_json
from .config import TrainConfig
from .coordascent import fit_coordinate_ascent
from .linear import fit_linear
from .trees import compile_tree, fit_forest, fit_mart, predict_compiled

MODEL_FORMAT_VERSION = 1


class TrainedModel:
    """A fitted ranker: pure function of (parameters, input vector)."""

    def __init__(self, model_type: str, feature_names: tuple[str, ...],
                 normalization: tuple[list[float], list[float]] | None,
                 parameters: dict, rng_seed: int):
        self.model_type = model_type
        self.feature_names = tuple(feature_names)
        self.normalization = normalization  # (means, stds) or None
        self.parameters = parameters
        self.rng_seed = rng_seed
        self._name_to_col = {n: i for i, n in enumerate(self.feature_names)}
        self._compiled = None

    @property
    def descriptor(self) -> str:
        return f"{self.model_type}(seed={self.rng_seed})"

    # -- scoring ---------------------------------------------------------

    def matrix_from(self, rlist: RankingList) -> np.ndarray:
        rows = []
        for cand in rlist.candidates:
            try:
                rows.append([float(cand.features[name]) for name in self.feature_names])
            except KeyError as exc:
                raise FeatureSchemaMismatch(
                    f"candidate {cand.id} lacks feature {exc.args[0]!r} required by the model"
                ) from exc
        return np.asarray(rows, dtype=np.float64).reshape(len(rows), len(self.feature_names))

    def _normalize(self, X: np.ndarray) -> np.ndarray:
        if self.normalization is None:
            return X
        means, stds = self.normalization
        safe = np.asarray([s if s > 0 else 1.0 for s in stds])
        return (X - np.asarray(means)) / safe

    def score_matrix(self, X: np.ndarray) -> np.ndarray:
        Z = self._normalize(X)
        params = self.parameters
        if self.model_type == "linear":
            return Z @ np.asarray(params["weights"]) + params["intercept"]
        if self.model_type == "coordinate-ascent":
            return Z @ np.asarray(params["weights"])
        if self.model_type == "random-forest":
            compiled = self._compiled_trees()
            total = np.zeros(len(Z))
            for tree in compiled:
                total += predict_compiled(tree, Z)
            return total / len(compiled)
        if self.model_type == "mart":
            compiled = self._compiled_trees()
            total = np.full(len(Z), float(params["base"]))
            for tree, weight in zip(compiled, params["weights"]):
                total += weight * predict_compiled(tree, Z)
            return total
        raise SchemaError(f"unknown model_type {self.model_type!r}")

    def _compiled_trees(self):
        if self._compiled is None:
            self._compiled = [compile_tree(t, self._name_to_col) for t in self.parameters["trees"]]
        return self._compiled

    def predict_scores(self, rlist: RankingList) -> list[float]:
        return [float(s) for s in self.score_matrix(self.matrix_from(rlist))]

    def rank_lists(self, lists: list[RankingList]) -> list[list[str]]:
        """Batched ranking used by the evaluation harness."""
        if not lists:
            return []
        matrices = [self.matrix_from(r) for r in lists]
        scores = self.score_matrix(np.vstack(matrices))
        out = []
        offset = 0
        for rlist, X in zip(lists, matrices):
            chunk = scores[offset:offset + len(X)]
            offset += len(X)
            out.append(rank_by_scores([c.id for c in rlist.candidates], chunk))
        return out


def train(dataset: list[RankingList], config: TrainConfig,
          feature_names=None) -> TrainedModel:
    """Fit the configured model; deterministic given (dataset, config)."""
    if not dataset:
        raise CochangeError("cannot train on an empty dataset")
    if feature_names is None:
        present = dataset[0].candidates[0].features
        feature_names = tuple(n for n in FEATURE_NAMES if n in present) or tuple(sorted(present))
    feature_names = tuple(feature_names)

    lists_X = []
    lists_y = []
    for rlist in dataset:
        rows = []
        labels = []
        for cand in rlist.candidates:
            try:
                rows.append([float(cand.features[name]) for name in feature_names])
            except KeyError as exc:
                raise FeatureSchemaMismatch(
                    f"candidate {cand.id} lacks feature {exc.args[0]!r}"
                ) from exc
            labels.append(float(cand.label))
        lists_X.append(np.asarray(rows, dtype=np.float64))
        lists_y.append(np.asarray(labels, dtype=np.float64))

    X = np.vstack(lists_X)
    y = np.concatenate(lists_y)
    if config.log_labels:
        y = np.log1p(y)

    normalization = None
    if config.uses_normalization():
        means = [float(m) for m in X.mean(axis=0)]
        stds = [float(s) for s in X.std(axis=0)]
        normalization = (means, stds)
        safe = np.asarray([s if s > 0 else 1.0 for s in stds])
        X = (X - np.asarray(means)) / safe
        lists_X = [(lx - np.asarray(means)) / safe for lx in lists_X]

    if config.model_type == "linear":
        weights, intercept = fit_linear(X, y)
        parameters = {"weights": weights, "intercept": intercept}
    elif config.model_type == "random-forest":
        fc = config.forest
        trees = fit_forest(X, y, feature_names, fc.num_trees, fc.min_leaf,
                           fc.feature_fraction, fc.bag_fraction, config.rng_seed)
        parameters = {"trees": trees}
    elif config.model_type == "mart":
        mc = config.mart
        base, trees = fit_mart(X, y, feature_names, mc.num_trees, mc.learning_rate, mc.max_leaves)
        parameters = {"base": base, "trees": trees, "weights": [mc.learning_rate] * len(trees)}
    else:  # coordinate-ascent
        labels_int = [np.asarray([int(c.label) for c in r.candidates]) for r in dataset]
        weights = fit_coordinate_ascent(lists_X, labels_int, config.coordinate_ascent, config.rng_seed)
        parameters = {"weights": weights}

    return TrainedModel(
        model_type=config.model_type,
        feature_names=feature_names,
        normalization=normalization,
        parameters=parameters,
        rng_seed=config.rng_seed,
    )


def predict_scores(model: TrainedModel, rlist: RankingList) -> list[float]:
    return model.predict_scores(rlist)


def rank_candidates(model: TrainedModel, rlist: RankingList, k: int) -> list[tuple[str, float]]:
    """Top min(k, n) candidates as (id, score), score-descending with id
    tie-breaks."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = model.predict_scores(rlist)
    by_id = dict(zip((c.id for c in rlist.candidates), scores))
    ordered = rank_by_scores(list(by_id), list(by_id.values()))
    return [(cid, by_id[cid]) for cid in ordered[:k]]


def model_payload(model: TrainedModel) -> dict:
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "model_type": model.model_type,
        "feature_names": list(model.feature_names),
        "normalization": (
            None if model.normalization is None
            else {"means": model.normalization[0], "stds": model.normalization[1]}
        ),
        "rng_seed": model.rng_seed,
        "parameters": model.parameters,
    }
    return payload


def save_model(model: TrainedModel, path, provenance: dict | None = None) -> None:
    payload = model_payload(model)
    if provenance:
        payload["provenance"] = provenance
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(canonical_json(payload) + "\n", encoding="utf-8")


def load_model(path) -> TrainedModel:
    path = Path(path)
    if not path.exists():
        raise CochangeError(f"no such model file: {path}")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: malformed model file: {exc}") from exc
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise SchemaError(
            f"{path}: model format_version {version!r} unsupported (expected {MODEL_FORMAT_VERSION})"
        )
    model_type = payload.get("model_type")
    if model_type not in ("linear", "mart", "random-forest", "coordinate-ascent"):
        raise SchemaError(f"{path}: unknown model_type {model_type!r}")
    normalization = payload.get("normalization")
    if normalization is not None:
        normalization = (list(normalization["means"]), list(normalization["stds"]))
    for key in ("feature_names", "parameters", "rng_seed"):
        if key not in payload:
            raise SchemaError(f"{path}: missing {key!r}")
    return TrainedModel(
        model_type=model_type,
        feature_names=tuple(payload["feature_names"]),
        normalization=normalization,
        parameters=payload["parameters"],
        rng_seed=payload["rng_seed"],
    )
