import pytest

from fixture_repo import FixtureRepo, build_fixture_repo


@pytest.fixture(scope="session")
def fixture_repo(tmp_path_factory) -> FixtureRepo:
    return build_fixture_repo(tmp_path_factory.mktemp("fixture") / "repo")


@pytest.fixture(scope="session")
def artifacts(fixture_repo, mined):
    """ProjectArtifacts over the fixture repo with snapshot caching."""
    from cochange.pipeline import ProjectArtifacts

    return ProjectArtifacts(
        repo=mined["repo"],
        commits=mined["commits"],
        change_sets=mined["change_sets"],
        histories=mined["histories"],
    )


@pytest.fixture(scope="session")
def mined(fixture_repo):
    """Scan + diff + group + histories over the fixture repo, shared across
    tests (everything downstream is read-only)."""
    from cochange.mining import (
        GitRepo,
        build_edit_histories,
        events_from_change_sets,
        group_change_sets,
    )
    from cochange.mining.diffing import methods_changed_by_commit
    from cochange.pipeline import FAR_FUTURE

    repo = GitRepo(fixture_repo.path)
    commits = repo.scan(FAR_FUTURE)
    by_sha = {c.sha: c for c in commits}
    methods_by_commit = {c.sha: methods_changed_by_commit(repo, c, by_sha) for c in commits}
    change_sets = group_change_sets(commits, methods_by_commit=methods_by_commit)
    events = events_from_change_sets(change_sets, by_sha, methods_by_commit)
    histories = build_edit_histories(change_sets, events)
    return {
        "repo": repo,
        "commits": commits,
        "by_sha": by_sha,
        "methods_by_commit": methods_by_commit,
        "change_sets": change_sets,
        "histories": histories,
    }
