"""Method-level change detection between a commit and its parent.

A method counts as changed iff its comment-stripped, whitespace-collapsed
body differs between the two revisions, or it exists in exactly one of them.
Rename detection pairs old/new files so that a pure file move (identical
normalized bodies) reports no changes, while the identity rule still treats
a renamed method as delete + add once it is edited.
"""

import logging

from collections import defaultdict

from ..analysis.java import extract_methods, normalize_body_text
from ..identity import signature_key
from .gitrepo import SOURCE_SUFFIX, CommitRecord, GitRepo

logger = logging.getLogger(__name__)


def diff_commit_methods(repo: GitRepo, commit: CommitRecord, parent: CommitRecord | None,
                        extractor=extract_methods) -> set[str]:
    """Method ids changed by `commit` relative to one parent (all extracted
    methods for a root commit)."""
    if parent is None:
        changed = set()
        for path in repo.ls_files(commit.sha):
            content = repo.show_file(commit.sha, path)
            if content is None:
                continue
            changed.update(m.method_id for m in extractor(path, content))
        return changed

    changed: set[str] = set()
    for status, old_path, new_path in repo.diff_name_status(parent.sha, commit.sha):
        relevant = (old_path or "").endswith(SOURCE_SUFFIX) or (new_path or "").endswith(SOURCE_SUFFIX)
        if not relevant:
            continue
        old_methods = _extract_at(repo, parent.sha, old_path, extractor)
        new_methods = _extract_at(repo, commit.sha, new_path, extractor)
        changed.update(_diff_method_lists(old_methods, new_methods))
    return changed


def _extract_at(repo, sha, path, extractor):
    if path is None:
        return []
    content = repo.show_file(sha, path)
    if content is None:
        logger.warning("unreadable %s at %s", path, sha[:12])
        return []
    return extractor(path, content)


def _diff_method_lists(old_methods, new_methods) -> set[str]:
    """Pair methods across the two revisions by (type, name, params) so a
    file rename matches counterparts path-independently; unmatched or
    body-changed methods are reported."""
    old_by_key = defaultdict(list)
    new_by_key = defaultdict(list)
    for m in old_methods:
        old_by_key[signature_key(m.type_name, m.name, m.param_types)].append(m)
    for m in new_methods:
        new_by_key[signature_key(m.type_name, m.name, m.param_types)].append(m)

    changed: set[str] = set()
    for key in set(old_by_key) | set(new_by_key):
        olds = sorted(old_by_key.get(key, []), key=lambda m: normalize_body_text(m.body_source))
        news = sorted(new_by_key.get(key, []), key=lambda m: normalize_body_text(m.body_source))
        for om, nm in zip(olds, news):
            if normalize_body_text(om.body_source) != normalize_body_text(nm.body_source):
                changed.add(nm.method_id)
                if om.method_id != nm.method_id:
                    changed.add(om.method_id)
        for om in olds[len(news):]:
            changed.add(om.method_id)
        for nm in news[len(olds):]:
            changed.add(nm.method_id)
    return changed


def methods_changed_by_commit(repo: GitRepo, commit: CommitRecord,
                              by_sha: dict[str, CommitRecord],
                              extractor=extract_methods) -> set[str]:
    """Per-commit changed-method set used by the pipeline.

    Ordinary commits diff against their parent. Merge commits report the
    intersection of their pairwise diffs: only methods whose merged result
    differs from every parent (conflict resolutions) count as changed by the
    merge itself; branch work stays attributed to branch commits.
    """
    if not commit.parent_shas:
        return diff_commit_methods(repo, commit, None, extractor)
    sets = []
    for parent_sha in commit.parent_shas:
        parent = by_sha.get(parent_sha) or repo.commit_info(parent_sha)
        sets.append(diff_commit_methods(repo, commit, parent, extractor))
    return set.intersection(*sets) if sets else set()
