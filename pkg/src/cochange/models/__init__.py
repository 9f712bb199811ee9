"""Learning-to-rank models: linear, MART, random forest, coordinate ascent."""

from .config import (
    MODEL_TYPES,
    CoordinateAscentConfig,
    ForestConfig,
    MartConfig,
    TrainConfig,
)
from .api import (
    MODEL_FORMAT_VERSION,
    TrainedModel,
    load_model,
    model_payload,
    predict_scores,
    rank_candidates,
    save_model,
    train,
)

__all__ = [
    "MODEL_TYPES",
    "CoordinateAscentConfig",
    "ForestConfig",
    "MartConfig",
    "TrainConfig",
    "MODEL_FORMAT_VERSION",
    "TrainedModel",
    "load_model",
    "model_payload",
    "predict_scores",
    "rank_candidates",
    "save_model",
    "train",
]
