"""Thin subprocess wrapper around git plumbing.

One `git log` pass recovers the commit graph; per-commit diffs and file
contents go through `diff-tree`/`show`. All output parsing is defensive:
repositories in the wild contain empty commits, merges with no combined
diff, and renames.
"""

import logging
import subprocess

from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

from ..errors import GitError, NotARepositoryError
from ..storage import parse_instant

logger = logging.getLogger(__name__)

SOURCE_SUFFIX = ".java"

_LOG_FORMAT = "%x01%H%x02%P%x02%ae%x02%cI"


@dataclass(frozen=True)
class CommitRecord:
    sha: str
    author: str  # author email, lowercased
    timestamp: datetime
    parent_shas: tuple[str, ...]
    changed_files: tuple[str, ...]

    @property
    def is_merge(self) -> bool:
        return len(self.parent_shas) >= 2


class GitRepo:
    def __init__(self, path):
        self.path = Path(path)
        if not self.path.exists():
            raise NotARepositoryError(f"no such path: {self.path}")
        try:
            self._run("rev-parse", "--git-dir")
        except GitError as exc:
            raise NotARepositoryError(f"not a git repository: {self.path}") from exc

    def _run(self, *args: str) -> str:
        cmd = ["git", "-C", str(self.path), *args]
        proc = subprocess.run(cmd, capture_output=True, text=True)
        if proc.returncode != 0:
            raise GitError(f"git {' '.join(args[:2])} failed: {proc.stderr.strip()}")
        return proc.stdout

    def head(self) -> str:
        return self._run("rev-parse", "HEAD").strip()

    def scan(self, until: datetime) -> list[CommitRecord]:
        """All commits reachable from HEAD with commit time <= until,
        topologically ordered (parents before children)."""
        out = self._run(
            "log", "--topo-order", "--reverse", f"--format={_LOG_FORMAT}", "--name-only", "HEAD"
        )
        records: list[CommitRecord] = []
        header: tuple | None = None
        files: list[str] = []

        def flush():
            if header is None:
                return
            sha, parents, author, ts = header
            if ts <= until:
                records.append(
                    CommitRecord(
                        sha=sha,
                        author=author.lower(),
                        timestamp=ts,
                        parent_shas=parents,
                        changed_files=tuple(files),
                    )
                )

        for line in out.splitlines():
            if line.startswith("\x01"):
                flush()
                sha, parents, author, ts = line[1:].split("\x02")
                header = (sha, tuple(parents.split()), author, parse_instant(ts))
                files = []
            elif line.strip():
                files.append(line.strip())
        flush()
        return records

    def commit_info(self, sha: str) -> CommitRecord:
        out = self._run("log", "-1", f"--format={_LOG_FORMAT}", sha).strip()
        sha_, parents, author, ts = out.lstrip("\x01").split("\x02")
        return CommitRecord(
            sha=sha_,
            author=author.lower(),
            timestamp=parse_instant(ts),
            parent_shas=tuple(parents.split()),
            changed_files=(),
        )

    def diff_name_status(self, parent_sha: str, sha: str) -> list[tuple[str, str | None, str | None]]:
        """(status, old_path, new_path) entries with rename detection; for
        renames both paths are set, for A/D one side is None."""
        out = self._run("diff-tree", "-r", "-M", "--name-status", parent_sha, sha)
        entries = []
        for line in out.splitlines():
            parts = line.split("\t")
            if len(parts) < 2:
                continue
            status = parts[0]
            if status.startswith("R") or status.startswith("C"):
                entries.append((status, parts[1], parts[2]))
            elif status == "A":
                entries.append((status, None, parts[1]))
            elif status == "D":
                entries.append((status, parts[1], None))
            else:  # M, T, ...
                entries.append((status, parts[1], parts[1]))
        return entries

    def show_file(self, sha: str, path: str) -> str | None:
        try:
            return self._run("show", f"{sha}:{path}")
        except GitError:
            return None

    def ls_files(self, sha: str, suffix: str = SOURCE_SUFFIX) -> list[str]:
        out = self._run("ls-tree", "-r", "--name-only", sha)
        return [line for line in out.splitlines() if line.endswith(suffix)]

    def snapshot_files(self, sha: str, suffix: str = SOURCE_SUFFIX) -> dict[str, str]:
        files = {}
        for path in self.ls_files(sha, suffix):
            content = self.show_file(sha, path)
            if content is not None:
                files[path] = content
        return files


def scan_repository(repo_path, until: datetime) -> list[CommitRecord]:
    """Deterministic topological scan of the default branch up to `until`."""
    return GitRepo(repo_path).scan(until)


def last_commit_at_or_before(commits: list[CommitRecord], instant: datetime) -> CommitRecord | None:
    """Latest scanned commit with timestamp <= instant (scan order breaks ties)."""
    best = None
    for c in commits:
        if c.timestamp <= instant:
            if best is None or c.timestamp >= best.timestamp:
                best = c
    return best
