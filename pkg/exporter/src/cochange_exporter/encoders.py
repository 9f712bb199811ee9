"""Encoder backends.

`TransformersEncoder` runs a real pretrained code encoder (CodeBERT-style)
when its weights are obtainable. `HashedEncoder` is a deterministic,
dependency-free stand-in that keeps the full export pipeline — batching,
truncation accounting, pooling, schema — testable offline; it is not a
semantic model and says so.
"""

import hashlib
import logging
import re
import struct

logger = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 512

_TOKEN_RE = re.compile(r"[A-Za-z_$][\w$]*|\d+|\S")


class EncoderUnavailable(RuntimeError):
    """The requested encoder cannot be constructed (missing packages or
    unobtainable weights)."""


def resolve_encoder(model_identifier: str):
    """"hashed" or "hashed:<dim>" selects the offline backend; anything else
    is treated as a transformers model id or local path."""
    if model_identifier == "hashed" or model_identifier.startswith("hashed:"):
        _, _, dim = model_identifier.partition(":")
        return HashedEncoder(dimension=int(dim) if dim else 256)
    return TransformersEncoder(model_identifier)


class HashedEncoder:
    """Deterministic pseudo-embeddings from token hashes."""

    def __init__(self, dimension: int = 256, max_tokens: int = DEFAULT_MAX_TOKENS):
        self.dimension = dimension
        self.max_tokens = max_tokens
        self.identifier = f"hashed:{dimension}"

    def _token_vector(self, token: str) -> list[float]:
        out = []
        counter = 0
        while len(out) < self.dimension:
            digest = hashlib.md5(f"{token}\x00{counter}".encode("utf-8")).digest()
            for i in range(0, 16, 8):
                (value,) = struct.unpack(">q", digest[i:i + 8])
                out.append(value / 2 ** 63)
            counter += 1
        return out[: self.dimension]

    def encode_batch(self, texts: list[str], pooling: str) -> tuple[list[list[float]], int]:
        vectors = []
        truncated = 0
        for text in texts:
            tokens = _TOKEN_RE.findall(text)
            if len(tokens) > self.max_tokens:
                tokens = tokens[: self.max_tokens]
                truncated += 1
            if not tokens:
                tokens = ["\x00empty"]
            if pooling == "first-token":
                # sequence-sensitive summary, the stand-in for a [CLS] state
                vectors.append(self._token_vector("\x1f".join(tokens)))
            else:
                acc = [0.0] * self.dimension
                for token in tokens:
                    for i, value in enumerate(self._token_vector(token)):
                        acc[i] += value
                vectors.append([v / len(tokens) for v in acc])
        return vectors, truncated


class TransformersEncoder:
    """Pretrained encoder via the transformers library (CPU)."""

    def __init__(self, model_identifier: str, max_tokens: int = DEFAULT_MAX_TOKENS,
                 local_files_only: bool = False):
        self.identifier = model_identifier
        try:
            import torch
            from transformers import AutoModel, AutoTokenizer
        except ImportError as exc:
            raise EncoderUnavailable(
                "transformers/torch are not installed; install the 'encoder' extra "
                "or use the 'hashed' backend"
            ) from exc
        self._torch = torch
        try:
            self.tokenizer = AutoTokenizer.from_pretrained(
                model_identifier, local_files_only=local_files_only)
            self.model = AutoModel.from_pretrained(
                model_identifier, local_files_only=local_files_only)
        except Exception as exc:
            raise EncoderUnavailable(
                f"could not obtain encoder weights for {model_identifier!r}: {exc}"
            ) from exc
        self.model.eval()
        model_limit = getattr(self.tokenizer, "model_max_length", max_tokens)
        self.max_tokens = min(max_tokens, model_limit if model_limit > 0 else max_tokens)
        self.dimension = int(self.model.config.hidden_size)

    def encode_batch(self, texts: list[str], pooling: str) -> tuple[list[list[float]], int]:
        lengths = [len(self.tokenizer(t, truncation=False)["input_ids"]) for t in texts]
        truncated = sum(1 for n in lengths if n > self.max_tokens)
        batch = self.tokenizer(texts, truncation=True, max_length=self.max_tokens,
                               padding=True, return_tensors="pt")
        with self._torch.no_grad():
            hidden = self.model(**batch).last_hidden_state
        if pooling == "first-token":
            pooled = hidden[:, 0, :]
        else:
            mask = batch["attention_mask"].unsqueeze(-1)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        return [[float(v) for v in row] for row in pooled], truncated
