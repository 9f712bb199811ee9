"""Method embeddings: an external-file provider (vectors produced by a real
code encoder) and a self-contained token-hash TF-IDF fallback."""

import hashlib
import math
import re

from collections import Counter
from dataclasses import dataclass

from ..errors import CochangeError
from ..storage import read_jsonl
from .java import KEYWORDS, MethodRecord, mask_comments_and_strings

FALLBACK_DIM = 256

_IDENT_RE = re.compile(r"[A-Za-z_$][\w$]*")
_SUBTOKEN_RE = re.compile(r"[A-Z]+(?=[A-Z][a-z])|[A-Z]?[a-z]+|[A-Z]+|\d+")


@dataclass(frozen=True)
class EmbeddingVector:
    method_id: str
    values: tuple[float, ...]
    provider: str  # "external-file" | "token-hash-fallback"


def subtokens(body_source: str) -> list[str]:
    """Lower-cased sub-tokens of the identifiers in a body (camelCase and
    underscores split)."""
    masked = mask_comments_and_strings(body_source)
    out: list[str] = []
    for ident in _IDENT_RE.findall(masked):
        if ident in KEYWORDS:
            continue
        for part in ident.split("_"):
            out.extend(t.lower() for t in _SUBTOKEN_RE.findall(part))
    return out


def _bucket(token: str, dim: int) -> int:
    digest = hashlib.md5(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dim


class TokenHashEmbedder:
    """Deterministic fallback embedder: hashed sub-token counts weighted by
    smoothed inverse document frequency over the snapshot, L2-normalized."""

    provider = "token-hash-fallback"

    def __init__(self, methods: list[MethodRecord], dim: int = FALLBACK_DIM):
        self.dim = dim
        self._df: Counter = Counter()
        self._n_docs = len(methods)
        for m in methods:
            self._df.update(set(subtokens(m.body_source)))

    def _idf(self, token: str) -> float:
        return math.log((1 + self._n_docs) / (1 + self._df[token])) + 1.0

    def embed(self, m: MethodRecord) -> EmbeddingVector:
        values = [0.0] * self.dim
        for token, count in Counter(subtokens(m.body_source)).items():
            values[_bucket(token, self.dim)] += count * self._idf(token)
        norm = math.sqrt(sum(v * v for v in values))
        if norm > 0:
            values = [v / norm for v in values]
        return EmbeddingVector(m.method_id, tuple(values), self.provider)


class ExternalFileEmbeddings:
    """Vectors read from an embeddings.jsonl file ({"method_id","values"} per
    line), the contract shared with the embedding exporter."""

    provider = "external-file"

    def __init__(self, vectors: dict[str, tuple[float, ...]]):
        lengths = {len(v) for v in vectors.values()}
        if len(lengths) > 1:
            raise CochangeError(f"inconsistent embedding lengths: {sorted(lengths)}")
        for mid, vec in vectors.items():
            if any(math.isnan(v) or math.isinf(v) for v in vec):
                raise CochangeError(f"non-finite embedding values for {mid}")
        self._vectors = vectors
        self.dim = lengths.pop() if lengths else 0

    @classmethod
    def load(cls, path) -> "ExternalFileEmbeddings":
        _, rows = read_jsonl(path)
        vectors = {}
        for row in rows:
            vectors[row["method_id"]] = tuple(float(v) for v in row["values"])
        return cls(vectors)

    def embed(self, m: MethodRecord) -> EmbeddingVector:
        try:
            values = self._vectors[m.method_id]
        except KeyError:
            raise CochangeError(
                f"external embeddings file has no vector for method {m.method_id}"
            ) from None
        return EmbeddingVector(m.method_id, values, self.provider)


def cosine_similarity(u: EmbeddingVector, v: EmbeddingVector) -> float:
    """dot(u,v)/(|u||v|); zero-norm input is defined as 0 similarity."""
    if u.provider != v.provider or len(u.values) != len(v.values):
        raise CochangeError("cosine similarity requires one provider and one length")
    dot = sum(a * b for a, b in zip(u.values, v.values))
    nu = math.sqrt(sum(a * a for a in u.values))
    nv = math.sqrt(sum(b * b for b in v.values))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return max(-1.0, min(1.0, dot / (nu * nv)))
