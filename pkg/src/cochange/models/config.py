"""Training configuration for the four ranker families.

The hyperparameter defaults are deliberately modest desk-scale settings;
every field can be overridden from the config file or CLI.
"""

from dataclasses import dataclass, field

from ..errors import ConfigError

MODEL_TYPES = ("linear", "mart", "random-forest", "coordinate-ascent")


@dataclass(frozen=True)
class ForestConfig:
    num_trees: int = 100
    feature_fraction: str = "sqrt"  # features sampled per split
    min_leaf: int = 1
    bag_fraction: float = 1.0  # bootstrap fraction, drawn with replacement


@dataclass(frozen=True)
class MartConfig:
    num_trees: int = 200
    learning_rate: float = 0.1
    max_leaves: int = 10


@dataclass(frozen=True)
class CoordinateAscentConfig:
    restarts: int = 5
    step_scale: float = 0.05
    tolerance: float = 1e-3
    max_sweeps: int = 25
    ndcg_k: int = 10  # the list-wise objective is mean NDCG@k


@dataclass(frozen=True)
class TrainConfig:
    model_type: str = "random-forest"
    rng_seed: int = 42
    forest: ForestConfig = field(default_factory=ForestConfig)
    mart: MartConfig = field(default_factory=MartConfig)
    coordinate_ascent: CoordinateAscentConfig = field(default_factory=CoordinateAscentConfig)
    log_labels: bool = False  # optional log1p target transform for point-wise models

    def __post_init__(self):
        if self.model_type not in MODEL_TYPES:
            raise ConfigError(f"unknown model_type {self.model_type!r}, expected one of {MODEL_TYPES}")
        if self.forest.num_trees < 1 or self.mart.num_trees < 1:
            raise ConfigError("tree counts must be >= 1")
        if self.forest.min_leaf < 1:
            raise ConfigError("min_leaf must be >= 1")
        if not (0.0 < self.mart.learning_rate <= 1.0):
            raise ConfigError("learning_rate must be in (0, 1]")
        if self.coordinate_ascent.restarts < 1 or self.coordinate_ascent.max_sweeps < 1:
            raise ConfigError("coordinate ascent counts must be >= 1")

    def uses_normalization(self) -> bool:
        """Z-score normalization applies to the linear-form models only;
        trees are scale invariant."""
        return self.model_type in ("linear", "coordinate-ascent")
