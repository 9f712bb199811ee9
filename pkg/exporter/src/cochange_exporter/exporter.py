"""Read methods.jsonl, run the encoder over method bodies, write
embeddings.jsonl ({"method_id", "values"} per line, id-sorted)."""

import json
import logging

from pathlib import Path

from .encoders import resolve_encoder
from .manifest import ExportManifest

logger = logging.getLogger(__name__)


def read_methods(path) -> tuple[list[tuple[str, str]], int]:
    """(method_id, body_source) pairs plus the count of skipped lines.

    A pipeline artifact header line is expected and not counted as a skip;
    malformed rows and duplicate ids are skipped with a warning.
    """
    pairs: list[tuple[str, str]] = []
    seen: set[str] = set()
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError:
                logger.warning("%s:%d: not valid JSON; skipping", path, lineno)
                skipped += 1
                continue
            if isinstance(row, dict) and "artifact" in row and "method_id" not in row:
                continue  # pipeline header
            if not isinstance(row, dict) or "method_id" not in row or "body_source" not in row:
                logger.warning("%s:%d: missing method_id/body_source; skipping", path, lineno)
                skipped += 1
                continue
            mid = str(row["method_id"])
            if mid in seen:
                logger.warning("%s:%d: duplicate method_id %s; keeping first", path, lineno, mid)
                skipped += 1
                continue
            seen.add(mid)
            pairs.append((mid, str(row["body_source"])))
    return pairs, skipped


def export_embeddings(manifest: ExportManifest, encoder=None) -> dict:
    """Run the export; returns a summary with the actual vector dimension."""
    if encoder is None:
        encoder = resolve_encoder(manifest.model_identifier)
    if manifest.dimension and manifest.dimension != encoder.dimension:
        raise ValueError(
            f"manifest dimension {manifest.dimension} does not match the "
            f"encoder's output width {encoder.dimension}"
        )

    pairs, skipped = read_methods(manifest.input_path)
    pairs.sort(key=lambda p: p[0])

    truncated_total = 0
    out_path = Path(manifest.output_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as fh:
        for start in range(0, len(pairs), manifest.batch_size):
            batch = pairs[start:start + manifest.batch_size]
            vectors, truncated = encoder.encode_batch([body for _, body in batch], manifest.pooling)
            truncated_total += truncated
            for (mid, _), vector in zip(batch, vectors):
                fh.write(json.dumps({"method_id": mid, "values": vector}) + "\n")

    if truncated_total:
        logger.info("%d methods exceeded the encoder token window and were truncated",
                    truncated_total)
    summary = {
        "written": len(pairs),
        "skipped_lines": skipped,
        "truncated": truncated_total,
        "dimension": encoder.dimension,
        "model": getattr(encoder, "identifier", manifest.model_identifier),
        "pooling": manifest.pooling,
        "output": str(out_path),
    }
    logger.info("wrote %(written)d vectors (dim %(dimension)d) to %(output)s", summary)
    return summary
