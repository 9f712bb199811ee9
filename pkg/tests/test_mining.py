"""history-miner: scanning, method diffs, change-set grouping, histories."""

import pytest

from fixture_repo import day, expected_ids

from cochange.errors import NotARepositoryError
from cochange.mining import GitRepo, group_change_sets, scan_repository
from cochange.pipeline import FAR_FUTURE

IDS = expected_ids()


def names(id_set):
    by_id = {v: k for k, v in IDS.items()}
    return {by_id[i] for i in id_set}


class TestScan:
    def test_commit_count_and_topological_order(self, fixture_repo, mined):
        commits = mined["commits"]
        assert len(commits) == 17
        seen = set()
        for c in commits:
            for parent in c.parent_shas:
                assert parent in seen, "parent must precede child in topological order"
            seen.add(c.sha)

    def test_merge_commits_have_two_parents(self, fixture_repo, mined):
        by_sha = mined["by_sha"]
        for label in ("M1", "M2", "M3"):
            assert len(by_sha[fixture_repo.sha(label)].parent_shas) == 2

    def test_until_before_root_yields_empty(self, fixture_repo):
        assert scan_repository(fixture_repo.path, day(-1)) == []

    def test_until_cuts_history(self, fixture_repo):
        commits = scan_repository(fixture_repo.path, day(100))
        assert [c.sha for c in commits] == [fixture_repo.sha(l) for l in ("c01", "c02", "c03")]

    def test_author_email_lowercased(self, mined):
        assert all(c.author == c.author.lower() and "@" in c.author for c in mined["commits"])

    def test_not_a_repository(self, tmp_path):
        with pytest.raises(NotARepositoryError):
            scan_repository(tmp_path / "nope", FAR_FUTURE)
        (tmp_path / "plain").mkdir()
        with pytest.raises(NotARepositoryError):
            scan_repository(tmp_path / "plain", FAR_FUTURE)

    def test_unreadable_object_store(self, fixture_repo, tmp_path):
        import shutil

        from cochange.errors import GitError

        broken = tmp_path / "broken"
        shutil.copytree(fixture_repo.path, broken)
        for sub in ("objects/pack", "objects"):
            target = broken / ".git" / sub
            if target.exists():
                for child in target.glob("**/*"):
                    if child.is_file():
                        child.unlink()
        with pytest.raises(GitError):
            scan_repository(broken, FAR_FUTURE)


class TestDiff:
    def test_root_commit_includes_every_method(self, fixture_repo, mined):
        changed = mined["methods_by_commit"][fixture_repo.sha("c01")]
        assert names(changed) == {"init", "load", "save", "helper"}

    def test_added_methods_detected(self, fixture_repo, mined):
        assert names(mined["methods_by_commit"][fixture_repo.sha("c04")]) == {"render", "update"}

    def test_body_edit_detected(self, fixture_repo, mined):
        assert names(mined["methods_by_commit"][fixture_repo.sha("c03")]) == {"load"}
        assert names(mined["methods_by_commit"][fixture_repo.sha("c05")]) == {"render", "save"}

    def test_comment_only_edit_is_not_a_change(self, fixture_repo, mined):
        assert mined["methods_by_commit"][fixture_repo.sha("c07")] == set()

    def test_pure_file_move_is_not_a_change(self, fixture_repo, mined):
        assert mined["methods_by_commit"][fixture_repo.sha("c08")] == set()

    def test_whitespace_reformat_is_not_a_change(self, fixture_repo, mined):
        assert names(mined["methods_by_commit"][fixture_repo.sha("c15")]) == {"stop", "size"}

    def test_clean_merges_change_nothing(self, fixture_repo, mined):
        for label in ("M1", "M2", "M3"):
            assert mined["methods_by_commit"][fixture_repo.sha(label)] == set()

    def test_rename_plus_edit_is_delete_and_add(self, fixture_repo, mined):
        # c09 edits the moved file: only the new identity changes afterwards
        assert names(mined["methods_by_commit"][fixture_repo.sha("c09")]) == {"norm_new"}


class TestChangeSets:
    def test_merge_inference_groups_branch_commits(self, fixture_repo, mined):
        by_id = {cs.cs_id: cs for cs in mined["change_sets"]}
        m1 = by_id[f"CS-{fixture_repo.sha('M1')}"]
        assert m1.source == "merge-inference"
        assert m1.commit_shas == frozenset(fixture_repo.sha(l) for l in ("M1", "c04", "c05"))
        assert m1.merged_at == day(150)
        assert names(m1.changed_method_ids) == {"render", "update", "save"}

        m2 = by_id[f"CS-{fixture_repo.sha('M2')}"]
        assert m2.commit_shas == frozenset(fixture_repo.sha(l) for l in ("M2", "c10", "c11"))
        assert names(m2.changed_method_ids) == {"join", "size", "load"}

        m3 = by_id[f"CS-{fixture_repo.sha('M3')}"]
        assert m3.commit_shas == frozenset(fixture_repo.sha(l) for l in ("M3", "c13"))
        assert names(m3.changed_method_ids) == {"update", "render"}

    def test_non_branch_commits_become_singletons(self, fixture_repo, mined):
        by_id = {cs.cs_id: cs for cs in mined["change_sets"]}
        assert len(mined["change_sets"]) == 12  # 3 merge-inferred + 9 singletons
        for label in ("c01", "c02", "c03", "c06", "c07", "c08", "c09", "c12", "c15"):
            cs = by_id[f"CS-{fixture_repo.sha(label)}"]
            assert cs.source == "single-commit"
            assert cs.commit_shas == frozenset([fixture_repo.sha(label)])

    def test_partition(self, mined):
        seen = set()
        for cs in mined["change_sets"]:
            assert not (cs.commit_shas & seen)
            seen |= cs.commit_shas
        assert seen == set(mined["by_sha"])

    def test_union_of_changed_methods_matches_commit_diffs(self, mined):
        from_sets = set()
        for cs in mined["change_sets"]:
            from_sets |= cs.changed_method_ids
        from_commits = set()
        for changed in mined["methods_by_commit"].values():
            from_commits |= changed
        assert from_sets == from_commits

    def test_offline_mapping_takes_precedence(self, fixture_repo, mined):
        mapping = {"PR-7": [fixture_repo.sha("c03")]}
        change_sets = group_change_sets(mined["commits"], mapping=mapping,
                                        methods_by_commit=mined["methods_by_commit"])
        by_id = {cs.cs_id: cs for cs in change_sets}
        assert by_id["PR-7"].source == "offline-mapping"
        assert by_id["PR-7"].commit_shas == frozenset([fixture_repo.sha("c03")])
        assert by_id["PR-7"].merged_at == day(100)
        assert f"CS-{fixture_repo.sha('c03')}" not in by_id

    def test_api_mapping_beats_offline_mapping(self, fixture_repo, mined):
        sha = fixture_repo.sha("c06")
        change_sets = group_change_sets(
            mined["commits"],
            mapping={"PR-offline": [sha]},
            api={"PR-api": [sha]},
            methods_by_commit=mined["methods_by_commit"],
        )
        by_id = {cs.cs_id: cs for cs in change_sets}
        assert by_id["PR-api"].source == "api-mapping"
        assert "PR-offline" not in by_id

    def test_unknown_sha_in_mapping_is_ignored(self, mined, caplog):
        mapping = {"PR-9": ["f" * 40]}
        change_sets = group_change_sets(mined["commits"], mapping=mapping,
                                        methods_by_commit=mined["methods_by_commit"])
        assert all(cs.cs_id != "PR-9" for cs in change_sets)

    def test_offline_mapping_file_roundtrip(self, tmp_path):
        from cochange.mining import read_offline_mapping, write_offline_mapping

        mapping = {"PR-2": ["b", "c"], "PR-1": ["a"]}
        path = tmp_path / "mapping.jsonl"
        write_offline_mapping(path, mapping)
        lines = path.read_text().splitlines()
        assert len(lines) == 2 and '"cs_id"' in lines[0]
        assert read_offline_mapping(path) == mapping

    def test_malformed_mapping_file_rejected(self, tmp_path):
        from cochange.errors import MappingError
        from cochange.mining import read_offline_mapping

        path = tmp_path / "mapping.jsonl"
        path.write_text('{"cs_id": "PR-1"}\n')  # missing commits
        with pytest.raises(MappingError):
            read_offline_mapping(path)

    def test_linear_history_without_mapping_is_all_singletons(self, mined):
        linear = [c for c in mined["commits"] if len(c.parent_shas) <= 1]
        linear = [c.__class__(sha=c.sha, author=c.author, timestamp=c.timestamp,
                              parent_shas=(), changed_files=c.changed_files)
                  for c in linear]
        change_sets = group_change_sets(linear)
        assert len(change_sets) == len(linear)
        assert all(cs.source == "single-commit" for cs in change_sets)


class TestHistories:
    def test_load_history(self, fixture_repo, mined):
        history = mined["histories"][IDS["load"]]
        assert [e.commit_sha for e in history.events] == [
            fixture_repo.sha("c01"), fixture_repo.sha("c03"), fixture_repo.sha("c11")
        ]
        assert [e.timestamp for e in history.events] == [day(0), day(100), day(310)]
        assert history.authors == {"alice@example.com", "bob@example.com", "dave@example.com"}

    def test_event_change_set_attribution(self, fixture_repo, mined):
        history = mined["histories"][IDS["size"]]
        cs_ids = [e.cs_id for e in history.events]
        assert cs_ids == [
            f"CS-{fixture_repo.sha('c06')}",
            f"CS-{fixture_repo.sha('M2')}",
            f"CS-{fixture_repo.sha('c15')}",
        ]

    def test_methods_without_events_are_absent(self, mined):
        assert all(h.events for h in mined["histories"].values())

    def test_authors_bounded_by_events(self, mined):
        for history in mined["histories"].values():
            assert len(history.authors) <= len(history.events)

    def test_rename_creates_fresh_history(self, mined):
        # the moved file's method starts a new history at its first real edit
        assert [e.timestamp for e in mined["histories"][IDS["norm_old"]].events] == [day(50)]
        assert [e.timestamp for e in mined["histories"][IDS["norm_new"]].events] == [day(275)]

    def test_unknown_change_set_rejected(self, mined):
        from cochange.mining import MethodChangeEvent, build_edit_histories

        bogus = MethodChangeEvent(method_id="m", cs_id="CS-missing", commit_sha="x",
                                  author="a@x", timestamp=day(1))
        with pytest.raises(ValueError):
            build_edit_histories(mined["change_sets"], [bogus])
