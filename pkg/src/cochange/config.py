"""Run configuration: defaults < config file < command line.

The config file is flat key=value INI text with sections ([run], [mine],
[dataset], [train], [evaluate], [grid]); every key can also be set by a CLI
flag. A run's resolved config is embedded (hashed) in every artifact it
emits.
"""

import configparser

from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from .errors import ConfigError
from .models import CoordinateAscentConfig, ForestConfig, MartConfig, TrainConfig
from .storage import format_instant, hash_obj, parse_instant

MAPPING_SOURCES = ("auto", "offline", "api", "merge")
EMBEDDING_PROVIDERS = ("fallback", "file")


@dataclass(frozen=True)
class RunConfig:
    repo_path: str = "."
    output_dir: str = "cochange-out"
    rng_seed: int = 42
    jobs: int = 0  # 0 = all cores

    # mine
    until: datetime | None = None
    mapping_source: str = "auto"
    mapping_file: str | None = None
    github_repo: str | None = None  # "owner/name", required for mapping_source=api

    # dataset
    train_label_days: int = 180
    test_label_days: int = 180
    blocking: bool = False
    embedding_provider: str = "fallback"
    embeddings_file: str | None = None
    prune_threshold: float = 0.7

    # train
    model: TrainConfig = field(default_factory=TrainConfig)

    # evaluate / rank
    k_values: tuple[int, ...] = (1, 3, 5, 10)
    rank_k: int = 5

    # importance
    repetitions: int = 5

    # grid
    grid_train_days: tuple[int, ...] = (30, 90, 180)
    grid_test_days: tuple[int, ...] = (5, 10, 20, 30, 60, 90, 120, 150, 180, 270)

    def __post_init__(self):
        if self.mapping_source not in MAPPING_SOURCES:
            raise ConfigError(f"mapping_source must be one of {MAPPING_SOURCES}")
        if self.embedding_provider not in EMBEDDING_PROVIDERS:
            raise ConfigError(f"embedding_provider must be one of {EMBEDDING_PROVIDERS}")
        if self.embedding_provider == "file" and not self.embeddings_file:
            raise ConfigError("embedding_provider=file requires embeddings_file")
        if self.mapping_source == "offline" and not self.mapping_file:
            raise ConfigError("mapping_source=offline requires mapping_file")
        if self.mapping_source == "api" and not self.github_repo:
            raise ConfigError("mapping_source=api requires github_repo (owner/name)")
        if self.train_label_days < 1 or self.test_label_days < 1:
            raise ConfigError("label periods must be at least one day")

    def as_dict(self) -> dict:
        return {
            "repo_path": str(self.repo_path),
            "output_dir": str(self.output_dir),
            "rng_seed": self.rng_seed,
            "jobs": self.jobs,
            "until": format_instant(self.until) if self.until else None,
            "mapping_source": self.mapping_source,
            "mapping_file": self.mapping_file,
            "github_repo": self.github_repo,
            "train_label_days": self.train_label_days,
            "test_label_days": self.test_label_days,
            "blocking": self.blocking,
            "embedding_provider": self.embedding_provider,
            "embeddings_file": self.embeddings_file,
            "prune_threshold": self.prune_threshold,
            "model": {
                "model_type": self.model.model_type,
                "rng_seed": self.model.rng_seed,
                "log_labels": self.model.log_labels,
                "forest": vars(self.model.forest).copy(),
                "mart": vars(self.model.mart).copy(),
                "coordinate_ascent": vars(self.model.coordinate_ascent).copy(),
            },
            "k_values": list(self.k_values),
            "rank_k": self.rank_k,
            "repetitions": self.repetitions,
            "grid_train_days": list(self.grid_train_days),
            "grid_test_days": list(self.grid_test_days),
        }

    def config_hash(self) -> str:
        return hash_obj(self.as_dict())

    def out(self, name: str) -> Path:
        return Path(self.output_dir) / name


def _int_tuple(raw: str) -> tuple[int, ...]:
    try:
        return tuple(int(v.strip()) for v in raw.split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {raw!r}") from exc


def load_config_file(path) -> dict:
    """Flatten an INI config file into override keys understood by
    build_config."""
    parser = configparser.ConfigParser()
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    parser.read(path)
    overrides: dict = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            overrides[key] = value
    return overrides


_BOOL_KEYS = {"blocking", "log_labels"}
_INT_KEYS = {
    "rng_seed", "jobs", "train_label_days", "test_label_days", "rank_k",
    "repetitions", "num_trees", "min_leaf", "max_leaves", "mart_num_trees",
    "restarts", "max_sweeps", "ndcg_k",
}
_FLOAT_KEYS = {"learning_rate", "step_scale", "tolerance", "prune_threshold", "bag_fraction"}
_TUPLE_KEYS = {"k_values", "grid_train_days", "grid_test_days"}


def build_config(overrides: dict) -> RunConfig:
    """Construct a RunConfig from string/typed overrides (file values arrive
    as strings, CLI values already typed)."""
    values = {}
    model_kwargs: dict = {}
    forest = {}
    mart = {}
    ca = {}

    for key, raw in overrides.items():
        if raw is None:
            continue
        value = raw
        if isinstance(raw, str):
            if key in _BOOL_KEYS:
                value = raw.strip().lower() in ("1", "true", "yes", "on")
            elif key in _INT_KEYS:
                value = int(raw)
            elif key in _FLOAT_KEYS:
                value = float(raw)
            elif key in _TUPLE_KEYS:
                value = _int_tuple(raw)
            elif key == "until":
                value = parse_instant(raw)
        if key == "model_type":
            model_kwargs["model_type"] = value
        elif key == "log_labels":
            model_kwargs["log_labels"] = value
        elif key in ("num_trees", "min_leaf", "bag_fraction", "feature_fraction"):
            forest[key] = value
        elif key in ("mart_num_trees", "learning_rate", "max_leaves"):
            mart["num_trees" if key == "mart_num_trees" else key] = value
        elif key in ("restarts", "step_scale", "tolerance", "max_sweeps", "ndcg_k"):
            ca[key] = value
        elif key == "seed":
            values["rng_seed"] = value if not isinstance(value, str) else int(value)
        else:
            values[key] = value

    try:
        model = TrainConfig(
            rng_seed=int(values.get("rng_seed", 42)),
            forest=ForestConfig(**forest),
            mart=MartConfig(**mart),
            coordinate_ascent=CoordinateAscentConfig(**ca),
            **model_kwargs,
        )
        return RunConfig(model=model, **values)
    except TypeError as exc:
        raise ConfigError(f"unknown configuration key: {exc}") from exc


def resolve_config(config_file=None, **cli_overrides) -> RunConfig:
    """Apply precedence: defaults < config file < CLI."""
    overrides: dict = {}
    if config_file:
        overrides.update(load_config_file(config_file))
    overrides.update({k: v for k, v in cli_overrides.items() if v is not None})
    return build_config(overrides)
