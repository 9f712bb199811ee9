"""Export run description."""

from dataclasses import dataclass

POOLINGS = ("first-token", "mean")


@dataclass(frozen=True)
class ExportManifest:
    input_path: str  # methods.jsonl
    output_path: str  # embeddings.jsonl
    model_identifier: str = "hashed"
    dimension: int = 0  # 0 = accept whatever the encoder emits
    pooling: str = "first-token"
    batch_size: int = 16

    def __post_init__(self):
        if self.pooling not in POOLINGS:
            raise ValueError(f"pooling must be one of {POOLINGS}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.dimension < 0:
            raise ValueError("dimension must be >= 0")
