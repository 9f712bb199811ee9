"""Per-method edit histories assembled from change sets."""

from dataclasses import dataclass
from datetime import datetime

from .changesets import ChangeSet
from .gitrepo import CommitRecord


@dataclass(frozen=True)
class MethodChangeEvent:
    method_id: str
    cs_id: str
    commit_sha: str
    author: str
    timestamp: datetime


@dataclass(frozen=True)
class MethodEditHistory:
    method_id: str
    events: tuple[MethodChangeEvent, ...]  # ascending by timestamp

    @property
    def authors(self) -> frozenset[str]:
        return frozenset(e.author for e in self.events)

    def events_in(self, start: datetime, end: datetime) -> list[MethodChangeEvent]:
        """Events with timestamp in the half-open range [start, end)."""
        return [e for e in self.events if start <= e.timestamp < end]


def events_from_change_sets(change_sets: list[ChangeSet],
                            by_sha: dict[str, CommitRecord],
                            methods_by_commit: dict[str, set[str]]) -> list[MethodChangeEvent]:
    """One event per (method, commit) with the commit's author and time."""
    events = []
    for cs in change_sets:
        for sha in sorted(cs.commit_shas):
            commit = by_sha[sha]
            for mid in sorted(methods_by_commit.get(sha, ())):
                events.append(
                    MethodChangeEvent(
                        method_id=mid,
                        cs_id=cs.cs_id,
                        commit_sha=sha,
                        author=commit.author,
                        timestamp=commit.timestamp,
                    )
                )
    return events


def build_edit_histories(change_sets: list[ChangeSet],
                         events: list[MethodChangeEvent]) -> dict[str, MethodEditHistory]:
    """Histories for every method with at least one event, time-sorted.

    Every event must reference a known change set; methods with zero events
    are simply absent (they are later excluded as having no edit history).
    """
    known_cs = {cs.cs_id for cs in change_sets}
    grouped: dict[str, list[MethodChangeEvent]] = {}
    for event in events:
        if event.cs_id not in known_cs:
            raise ValueError(f"event references unknown change set {event.cs_id}")
        grouped.setdefault(event.method_id, []).append(event)

    histories = {}
    for mid, evs in grouped.items():
        evs.sort(key=lambda e: (e.timestamp, e.commit_sha, e.cs_id))
        histories[mid] = MethodEditHistory(method_id=mid, events=tuple(evs))
    return histories
