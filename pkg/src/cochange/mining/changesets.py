"""Group commits into pull-request-level change sets.

Provider precedence per commit: api-mapping > offline-mapping >
merge-inference > single-commit fallback. Merge inference assigns to a merge
commit M every commit reachable from M's second parent but not from its
first parent; anything left becomes a singleton change set, so the result is
always a partition of the scanned commits.
"""

import json
import logging

from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from ..errors import MappingError
from .gitrepo import CommitRecord

logger = logging.getLogger(__name__)

SOURCES = ("api-mapping", "offline-mapping", "merge-inference", "single-commit")


@dataclass(frozen=True)
class ChangeSet:
    cs_id: str
    merged_at: datetime
    commit_shas: frozenset[str]
    changed_method_ids: frozenset[str]
    source: str


def group_change_sets(commits: list[CommitRecord],
                      mapping: dict[str, list[str]] | None = None,
                      api: dict[str, list[str]] | None = None,
                      methods_by_commit: dict[str, set[str]] | None = None) -> list[ChangeSet]:
    """Partition `commits` into change sets.

    `api` and `mapping` are cs_id -> commit-sha-list mappings (the former
    fetched from the PR API, the latter read from an offline mapping file).
    `methods_by_commit` fills changed_method_ids; omitted ids yield empty
    sets.
    """
    by_sha = {c.sha: c for c in commits}
    methods_by_commit = methods_by_commit or {}
    assigned: set[str] = set()
    change_sets: list[ChangeSet] = []

    def union_methods(shas) -> frozenset[str]:
        out: set[str] = set()
        for sha in shas:
            out.update(methods_by_commit.get(sha, ()))
        return frozenset(out)

    def claim_mapping(provider_mapping, source):
        for cs_id in sorted(provider_mapping):
            shas = provider_mapping[cs_id]
            known = []
            for sha in shas:
                if sha not in by_sha:
                    logger.warning("%s: unknown commit %s in %s; ignoring entry", source, sha, cs_id)
                elif sha in assigned:
                    logger.warning("%s: commit %s already grouped; ignoring in %s", source, sha, cs_id)
                else:
                    known.append(sha)
            if not known:
                continue
            assigned.update(known)
            merged_at = max(by_sha[s].timestamp for s in known)
            change_sets.append(
                ChangeSet(
                    cs_id=cs_id,
                    merged_at=merged_at,
                    commit_shas=frozenset(known),
                    changed_method_ids=union_methods(known),
                    source=source,
                )
            )

    if api:
        claim_mapping(api, "api-mapping")
    if mapping:
        claim_mapping(mapping, "offline-mapping")

    reach = _reachability(commits)
    for commit in commits:
        if not commit.is_merge or commit.sha in assigned:
            continue
        second_parent_side: set[str] = set()
        for parent in commit.parent_shas[1:]:
            second_parent_side |= reach.get(parent, set())
        exclusive = second_parent_side - reach.get(commit.parent_shas[0], set())
        members = {commit.sha} | {s for s in exclusive if s in by_sha and s not in assigned}
        assigned.update(members)
        change_sets.append(
            ChangeSet(
                cs_id=f"CS-{commit.sha}",
                merged_at=commit.timestamp,
                commit_shas=frozenset(members),
                changed_method_ids=union_methods(members),
                source="merge-inference",
            )
        )

    for commit in commits:
        if commit.sha in assigned:
            continue
        assigned.add(commit.sha)
        change_sets.append(
            ChangeSet(
                cs_id=f"CS-{commit.sha}",
                merged_at=commit.timestamp,
                commit_shas=frozenset([commit.sha]),
                changed_method_ids=union_methods([commit.sha]),
                source="single-commit",
            )
        )

    change_sets.sort(key=lambda cs: (cs.merged_at, cs.cs_id))
    return change_sets


def _reachability(commits: list[CommitRecord]) -> dict[str, set[str]]:
    """sha -> set of shas reachable via parent edges (inclusive), limited to
    the scanned commit set. Commits arrive topologically sorted, parents
    first, so one forward pass suffices."""
    reach: dict[str, set[str]] = {}
    for c in commits:
        acc = {c.sha}
        for p in c.parent_shas:
            acc |= reach.get(p, set())
        reach[c.sha] = acc
    return reach


def read_offline_mapping(path) -> dict[str, list[str]]:
    """Offline mapping file: one {"cs_id", "commits"} object per line."""
    mapping: dict[str, list[str]] = {}
    path = Path(path)
    if not path.exists():
        raise MappingError(f"mapping file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                mapping[str(obj["cs_id"])] = [str(s) for s in obj["commits"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise MappingError(f"{path}:{i}: bad mapping line: {exc}") from exc
    return mapping


def write_offline_mapping(path, mapping: dict[str, list[str]]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for cs_id in sorted(mapping):
            fh.write(json.dumps({"cs_id": cs_id, "commits": list(mapping[cs_id])}) + "\n")
