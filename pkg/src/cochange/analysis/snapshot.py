"""One analyzed snapshot of a project: parsed methods with resolved
superclass chains, call counts, clone-line cache and an embedding provider.

All members are immutable after construction; a snapshot is safe to share
read-only across workers.
"""

import logging

from dataclasses import dataclass, field, replace

from .callgraph import build_call_graph, symmetric_call_counts
from .clones import clone_similarity_lines, normalized_statement_lines
from .embeddings import EmbeddingVector, TokenHashEmbedder, cosine_similarity
from .java import MethodRecord, collect_types, parse_file, transitive_superclasses

logger = logging.getLogger(__name__)


@dataclass
class Snapshot:
    methods: dict[str, MethodRecord]
    call_counts: dict[tuple[str, str], int]  # unordered pair -> summed count
    _lines: dict[str, tuple[str, ...]] = field(default_factory=dict)
    _embeddings: dict[str, EmbeddingVector] = field(default_factory=dict)

    def clone_similarity(self, a: str, b: str) -> float:
        return clone_similarity_lines(self._lines[a], self._lines[b])

    def semantic_similarity(self, a: str, b: str) -> float:
        u, v = self._embeddings[a], self._embeddings[b]
        if not u.values or not v.values:
            return 0.0
        return cosine_similarity(u, v)

    def code_dependency(self, a: str, b: str) -> int:
        key = (a, b) if a < b else (b, a)
        return self.call_counts.get(key, 0)


def build_snapshot(files: dict[str, str], embedder=None) -> Snapshot:
    """Analyze a {path: source} mapping into a Snapshot.

    `embedder` defaults to the token-hash fallback built over this snapshot;
    pass an ExternalFileEmbeddings to use exported vectors instead.
    """
    parsed = []
    for path in sorted(files):
        parsed.append(parse_file(path, files[path]))

    type_table = collect_types(parsed)
    methods: dict[str, MethodRecord] = {}
    for pf in parsed:
        for m in pf.methods:
            chain = transitive_superclasses(m.superclasses, type_table)
            methods[m.method_id] = replace(m, superclasses=chain)

    records = [methods[k] for k in sorted(methods)]
    edges = build_call_graph(records)
    call_counts = symmetric_call_counts(edges)

    if embedder is None:
        embedder = TokenHashEmbedder(records)
    lines = {m.method_id: normalized_statement_lines(m.body_source) for m in records}
    embeddings = {}
    for m in records:
        try:
            embeddings[m.method_id] = embedder.embed(m)
        except Exception as exc:  # provider gap: fall through to zero similarity
            logger.warning("no embedding for %s: %s", m.method_id, exc)
            embeddings[m.method_id] = EmbeddingVector(m.method_id, (), "missing")

    return Snapshot(methods=methods, call_counts=call_counts, _lines=lines, _embeddings=embeddings)
