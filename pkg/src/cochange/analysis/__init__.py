"""Static analysis: method extraction, call graph, clones, embeddings."""

from .java import MethodRecord, extract_methods, parse_file, normalize_body_text
from .callgraph import CallEdge, build_call_graph
from .clones import clone_similarity, normalized_statement_lines
from .embeddings import (
    EmbeddingVector,
    ExternalFileEmbeddings,
    TokenHashEmbedder,
    cosine_similarity,
)
from .snapshot import Snapshot, build_snapshot

__all__ = [
    "MethodRecord",
    "extract_methods",
    "parse_file",
    "normalize_body_text",
    "CallEdge",
    "build_call_graph",
    "clone_similarity",
    "normalized_statement_lines",
    "EmbeddingVector",
    "ExternalFileEmbeddings",
    "TokenHashEmbedder",
    "cosine_similarity",
    "Snapshot",
    "build_snapshot",
]
