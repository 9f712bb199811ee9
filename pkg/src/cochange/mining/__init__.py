"""Repository mining: commits, method diffs, change sets, edit histories."""

from .gitrepo import CommitRecord, GitRepo, scan_repository
from .diffing import diff_commit_methods, methods_changed_by_commit
from .changesets import (
    ChangeSet,
    group_change_sets,
    read_offline_mapping,
    write_offline_mapping,
)
from .histories import (
    MethodChangeEvent,
    MethodEditHistory,
    build_edit_histories,
    events_from_change_sets,
)
from .github import fetch_pull_request_mapping

__all__ = [
    "CommitRecord",
    "GitRepo",
    "scan_repository",
    "diff_commit_methods",
    "methods_changed_by_commit",
    "ChangeSet",
    "group_change_sets",
    "read_offline_mapping",
    "write_offline_mapping",
    "MethodChangeEvent",
    "MethodEditHistory",
    "build_edit_histories",
    "events_from_change_sets",
    "fetch_pull_request_mapping",
]
