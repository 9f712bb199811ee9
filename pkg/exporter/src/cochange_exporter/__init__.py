"""Embedding exporter: methods.jsonl -> embeddings.jsonl."""

__version__ = "0.1.0"

from .manifest import ExportManifest
from .exporter import export_embeddings

__all__ = ["ExportManifest", "export_embeddings"]
