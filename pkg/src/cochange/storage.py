"""Artifact I/O: canonical JSON, JSONL files with provenance headers, hashing.

All persisted artifacts are byte-deterministic: keys sorted, compact
separators, timestamps serialized as second-precision ISO-8601 UTC. Pipeline
artifacts carry a first-line header object with the schema name, a format
version, the run config hash and the hashes of upstream artifacts. Files
consumed from outside the pipeline (offline PR mappings, embeddings) are
plain JSONL without a header.
"""

import hashlib
import json
import os

from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable

from .errors import MissingArtifactError, SchemaError

FORMAT_VERSION = 1


def parse_instant(value: str) -> datetime:
    """Parse an ISO-8601 timestamp into an aware UTC datetime."""
    dt = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def format_instant(dt: datetime) -> str:
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def content_hash(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def hash_obj(obj: Any) -> str:
    return content_hash(canonical_json(obj))


def file_hash(path: str | os.PathLike) -> str:
    return content_hash(Path(path).read_bytes())


def make_header(artifact: str, config_hash: str, inputs: dict[str, str]) -> dict:
    return {
        "artifact": artifact,
        "format_version": FORMAT_VERSION,
        "config_hash": config_hash,
        "inputs": dict(sorted(inputs.items())),
    }


def write_jsonl(path: str | os.PathLike, rows: Iterable[dict], header: dict | None = None) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        if header is not None:
            fh.write(canonical_json(header) + "\n")
        for row in rows:
            fh.write(canonical_json(row) + "\n")


def read_jsonl(path: str | os.PathLike, artifact: str | None = None) -> tuple[dict | None, list[dict]]:
    """Read a JSONL file, returning (header, rows).

    When `artifact` is given the file must start with a matching header of a
    supported format version; otherwise a leading header line is tolerated
    but not required.
    """
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"missing artifact: {path}")
    header: dict | None = None
    rows: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{i + 1}: not valid JSON: {exc}") from exc
            if i == 0 and isinstance(obj, dict) and "artifact" in obj and "format_version" in obj:
                header = obj
                continue
            rows.append(obj)
    if artifact is not None:
        if header is None:
            raise SchemaError(f"{path}: expected a '{artifact}' header line")
        if header.get("artifact") != artifact:
            raise SchemaError(f"{path}: artifact is '{header.get('artifact')}', expected '{artifact}'")
        if header.get("format_version") != FORMAT_VERSION:
            raise SchemaError(
                f"{path}: format_version {header.get('format_version')} unsupported "
                f"(this build reads version {FORMAT_VERSION})"
            )
    return header, rows


def write_json(path: str | os.PathLike, obj: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj) + "\n")


def read_json(path: str | os.PathLike) -> dict:
    path = Path(path)
    if not path.exists():
        raise MissingArtifactError(f"missing artifact: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON: {exc}") from exc
