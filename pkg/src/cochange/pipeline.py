"""Stage implementations behind the CLI: mine, dataset, train, evaluate,
importance, grid, rank.

Stages communicate through files in the output directory. Every pipeline
artifact embeds the run's config hash and the content hashes of its inputs;
reruns of `mine` with unchanged inputs are skipped ("up to date").
"""

import logging
import os

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from .analysis import ExternalFileEmbeddings, Snapshot, build_snapshot
from .config import RunConfig
from .dataset import (
    FEATURE_NAMES,
    FeatureContext,
    RankingList,
    WindowConfig,
    compute_feature_vector,
    prune_correlated_features,
    read_dataset,
    split_train_test,
    write_dataset,
    write_ltr_text,
)
from .dataset.builder import Candidate
from .errors import CochangeError, MissingArtifactError, UnknownQueryError
from .evaluation import (
    CloneBaseline,
    FileProximityBaseline,
    OracleScorer,
    SupportBaseline,
    evaluate,
    importance_report,
    window_experiment,
)
from .mining import (
    ChangeSet,
    GitRepo,
    MethodChangeEvent,
    MethodEditHistory,
    build_edit_histories,
    events_from_change_sets,
    fetch_pull_request_mapping,
    group_change_sets,
    read_offline_mapping,
    write_offline_mapping,
)
from .mining.diffing import methods_changed_by_commit
from .mining.gitrepo import last_commit_at_or_before
from .models import load_model, model_payload, rank_candidates, save_model, train
from .storage import (
    canonical_json,
    file_hash,
    format_instant,
    hash_obj,
    make_header,
    parse_instant,
    read_jsonl,
    write_json,
    write_jsonl,
)

logger = logging.getLogger(__name__)

FAR_FUTURE = datetime(9999, 1, 1, tzinfo=timezone.utc)
_ONE_SECOND = timedelta(seconds=1)

CHANGESETS_FILE = "changesets.jsonl"
HISTORIES_FILE = "histories.jsonl"
METHODS_FILE = "methods.jsonl"
TRAIN_DATASET_FILE = "dataset-train.jsonl"
TEST_DATASET_FILE = "dataset-test.jsonl"
MODEL_FILE = "model.json"
REPORT_FILE = "report.json"
IMPORTANCE_FILE = "importance.json"
GRID_FILE = "grid.json"


# --------------------------------------------------------------------------
# artifact row (de)serialization


def _changeset_rows(change_sets: list[ChangeSet]) -> list[dict]:
    return [
        {
            "cs_id": cs.cs_id,
            "merged_at": format_instant(cs.merged_at),
            "commits": sorted(cs.commit_shas),
            "source": cs.source,
        }
        for cs in change_sets
    ]


def _history_rows(histories: dict[str, MethodEditHistory]) -> list[dict]:
    rows = []
    for mid in sorted(histories):
        history = histories[mid]
        rows.append(
            {
                "method_id": mid,
                "events": [
                    {
                        "cs_id": e.cs_id,
                        "commit": e.commit_sha,
                        "author": e.author,
                        "timestamp": format_instant(e.timestamp),
                    }
                    for e in history.events
                ],
            }
        )
    return rows


def _method_rows(snapshot: Snapshot) -> list[dict]:
    rows = []
    for mid in sorted(snapshot.methods):
        m = snapshot.methods[mid]
        rows.append(
            {
                "method_id": m.method_id,
                "file_path": m.file_path,
                "package": m.package,
                "type_name": m.type_name,
                "name": m.name,
                "params": [{"type": t, "name": n} for t, n in m.params],
                "superclasses": list(m.superclasses),
                "start_line": m.line_span[0],
                "end_line": m.line_span[1],
                "is_test": m.is_test,
                "body_source": m.body_source,
            }
        )
    return rows


def load_changesets_and_histories(output_dir) -> tuple[list[ChangeSet], dict[str, MethodEditHistory]]:
    cs_header, cs_rows = read_jsonl(os.path.join(output_dir, CHANGESETS_FILE), artifact="changesets")
    h_header, h_rows = read_jsonl(os.path.join(output_dir, HISTORIES_FILE), artifact="histories")

    events: list[MethodChangeEvent] = []
    methods_by_cs: dict[str, set[str]] = {}
    for row in h_rows:
        for e in row["events"]:
            events.append(
                MethodChangeEvent(
                    method_id=row["method_id"],
                    cs_id=e["cs_id"],
                    commit_sha=e["commit"],
                    author=e["author"],
                    timestamp=parse_instant(e["timestamp"]),
                )
            )
            methods_by_cs.setdefault(e["cs_id"], set()).add(row["method_id"])

    change_sets = [
        ChangeSet(
            cs_id=row["cs_id"],
            merged_at=parse_instant(row["merged_at"]),
            commit_shas=frozenset(row["commits"]),
            changed_method_ids=frozenset(methods_by_cs.get(row["cs_id"], ())),
            source=row["source"],
        )
        for row in cs_rows
    ]
    histories = build_edit_histories(change_sets, events)
    return change_sets, histories


# --------------------------------------------------------------------------
# mined project bundle


@dataclass
class ProjectArtifacts:
    repo: GitRepo
    commits: list  # CommitRecord, topological order
    change_sets: list[ChangeSet]
    histories: dict[str, MethodEditHistory]
    embeddings_path: str | None = None
    _snapshots: dict[str, Snapshot] = field(default_factory=dict)

    @property
    def repo_creation(self) -> datetime:
        return min(c.timestamp for c in self.commits)

    @property
    def last_commit(self) -> datetime:
        return max(c.timestamp for c in self.commits)

    def snapshot_at(self, instant: datetime) -> Snapshot:
        commit = last_commit_at_or_before(self.commits, instant)
        if commit is None:
            raise CochangeError(f"no commit at or before {format_instant(instant)}")
        if commit.sha not in self._snapshots:
            embedder = None
            if self.embeddings_path:
                embedder = ExternalFileEmbeddings.load(self.embeddings_path)
            files = self.repo.snapshot_files(commit.sha)
            self._snapshots[commit.sha] = build_snapshot(files, embedder=embedder)
        return self._snapshots[commit.sha]


def load_project_artifacts(config: RunConfig) -> ProjectArtifacts:
    repo = GitRepo(config.repo_path)
    commits = repo.scan(config.until or FAR_FUTURE)
    change_sets, histories = load_changesets_and_histories(config.output_dir)
    embeddings = config.embeddings_file if config.embedding_provider == "file" else None
    return ProjectArtifacts(
        repo=repo,
        commits=commits,
        change_sets=change_sets,
        histories=histories,
        embeddings_path=embeddings,
    )


# --------------------------------------------------------------------------
# stages


def run_mine(config: RunConfig, github_token: str | None = None) -> dict:
    """history-miner + head-snapshot analysis; idempotent via content hashes."""
    repo = GitRepo(config.repo_path)
    until = config.until or FAR_FUTURE
    head = repo.head()

    inputs = {"repo_head": head, "until": format_instant(until)}
    if config.mapping_file and os.path.exists(config.mapping_file):
        inputs["mapping_file"] = file_hash(config.mapping_file)
    config_hash = config.config_hash()

    outputs = [config.out(n) for n in (CHANGESETS_FILE, HISTORIES_FILE, METHODS_FILE)]
    if all(p.exists() for p in outputs) and _headers_match(outputs, config_hash, inputs):
        logger.info("mine: up to date")
        return {"status": "up-to-date", "outputs": [str(p) for p in outputs]}

    commits = repo.scan(until)
    if not commits:
        raise CochangeError("no commits in range; nothing to mine")
    by_sha = {c.sha: c for c in commits}

    jobs = config.jobs or (os.cpu_count() or 1)
    logger.info("mine: diffing %d commits with %d workers", len(commits), jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(lambda c: methods_changed_by_commit(repo, c, by_sha), commits))
    else:
        results = [methods_changed_by_commit(repo, c, by_sha) for c in commits]
    methods_by_commit = {c.sha: changed for c, changed in zip(commits, results)}

    api_mapping = None
    offline_mapping = None
    if config.mapping_source == "api":
        owner, _, name = (config.github_repo or "").partition("/")
        token = github_token or os.environ.get("GITHUB_TOKEN", "")
        api_mapping = fetch_pull_request_mapping(owner, name, token)
        mapping_out = config.mapping_file or str(config.out("pr-mapping.jsonl"))
        write_offline_mapping(mapping_out, api_mapping)
        logger.info("mine: fetched %d merged pull requests", len(api_mapping))
    elif config.mapping_source in ("auto", "offline") and config.mapping_file:
        offline_mapping = read_offline_mapping(config.mapping_file)

    change_sets = group_change_sets(
        commits, mapping=offline_mapping, api=api_mapping, methods_by_commit=methods_by_commit
    )
    events = events_from_change_sets(change_sets, by_sha, methods_by_commit)
    histories = build_edit_histories(change_sets, events)

    snapshot_commit = last_commit_at_or_before(commits, until)
    snapshot = build_snapshot(repo.snapshot_files(snapshot_commit.sha))

    write_jsonl(config.out(CHANGESETS_FILE), _changeset_rows(change_sets),
                header=make_header("changesets", config_hash, inputs))
    write_jsonl(config.out(HISTORIES_FILE), _history_rows(histories),
                header=make_header("histories", config_hash, inputs))
    write_jsonl(config.out(METHODS_FILE), _method_rows(snapshot),
                header=make_header("methods", config_hash, inputs))

    stats = {
        "status": "mined",
        "commits": len(commits),
        "change_sets": len(change_sets),
        "methods_with_history": len(histories),
        "snapshot_methods": len(snapshot.methods),
        "outputs": [str(p) for p in outputs],
    }
    logger.info("mine: %(commits)d commits -> %(change_sets)d change sets, "
                "%(methods_with_history)d methods with history", stats)
    return stats


def _headers_match(paths, config_hash: str, inputs: dict) -> bool:
    for path in paths:
        try:
            header, _ = read_jsonl(path)
        except CochangeError:
            return False
        if not header or header.get("config_hash") != config_hash or header.get("inputs") != inputs:
            return False
    return True


def run_dataset(config: RunConfig) -> dict:
    artifacts = load_project_artifacts(config)
    split = split_train_test(
        artifacts, artifacts.last_commit,
        train_label_days=config.train_label_days,
        test_label_days=config.test_label_days,
        blocking=config.blocking,
    )
    schema = prune_correlated_features(split.train or split.test, threshold=config.prune_threshold)

    config_hash = config.config_hash()
    inputs = {
        "changesets": file_hash(config.out(CHANGESETS_FILE)),
        "histories": file_hash(config.out(HISTORIES_FILE)),
    }
    header = make_header("dataset", config_hash, inputs)
    header["feature_schema"] = schema.as_dict()

    write_dataset(config.out(TRAIN_DATASET_FILE), split.train, header=dict(header, role="train"))
    write_dataset(config.out(TEST_DATASET_FILE), split.test, header=dict(header, role="test"))
    write_ltr_text(config.out("dataset-train.txt"), split.train)
    write_ltr_text(config.out("dataset-test.txt"), split.test)

    stats = {
        "train_lists": len(split.train),
        "test_lists": len(split.test),
        "kept_features": schema.kept,
        "dropped_features": [d["name"] for d in schema.dropped],
    }
    logger.info("dataset: %(train_lists)d train lists, %(test_lists)d test lists", stats)
    if not split.train:
        logger.warning("dataset: no training data for this window configuration")
    return stats


def _read_dataset_with_schema(path) -> tuple[list[RankingList], list[str], dict]:
    header, lists = read_dataset(path)
    schema = (header or {}).get("feature_schema", {})
    kept = schema.get("kept") or list(FEATURE_NAMES)
    return lists, kept, header or {}


def run_train(config: RunConfig) -> dict:
    train_path = config.out(TRAIN_DATASET_FILE)
    lists, kept, _ = _read_dataset_with_schema(train_path)
    if not lists:
        raise CochangeError("training dataset is empty; adjust the window configuration")
    model = train(lists, config.model, feature_names=kept)
    provenance = {
        "config_hash": config.config_hash(),
        "inputs": {"dataset-train": file_hash(train_path)},
    }
    save_model(model, config.out(MODEL_FILE), provenance=provenance)
    return {
        "model_type": model.model_type,
        "features": list(model.feature_names),
        "output": str(config.out(MODEL_FILE)),
    }


def _scorer_for(name: str, config: RunConfig, model=None):
    if name == "model":
        return model if model is not None else load_model(config.out(MODEL_FILE))
    if name == "oracle":
        return OracleScorer()
    if name == "support":
        return SupportBaseline()
    if name == "proximity":
        return FileProximityBaseline(_method_path_index(config))
    if name == "clone":
        return CloneBaseline()
    raise CochangeError(f"unknown scorer {name!r}; expected model|oracle|support|proximity|clone")


def _method_path_index(config: RunConfig) -> dict[str, str]:
    _, rows = read_jsonl(config.out(METHODS_FILE), artifact="methods")
    return {row["method_id"]: row["file_path"] for row in rows}


def run_evaluate(config: RunConfig, scorer: str = "model") -> dict:
    test_path = config.out(TEST_DATASET_FILE)
    lists, _, _ = _read_dataset_with_schema(test_path)
    if not lists:
        raise CochangeError("test dataset is empty; adjust the window configuration")
    ranker = _scorer_for(scorer, config)
    report = evaluate(ranker, lists, k_values=config.k_values,
                      dataset_descriptor=str(test_path))
    payload = report.as_dict()
    payload["provenance"] = {
        "config_hash": config.config_hash(),
        "inputs": {
            "dataset-test": file_hash(test_path),
            **({"model": file_hash(config.out(MODEL_FILE))} if scorer == "model" else {}),
        },
    }
    write_json(config.out(REPORT_FILE), payload)
    return {
        "scorer": scorer,
        "queries": len(lists),
        "mean_ndcg": {str(k): report.mean[k] for k in report.k_values},
        "output": str(config.out(REPORT_FILE)),
    }


def run_importance(config: RunConfig) -> dict:
    test_path = config.out(TEST_DATASET_FILE)
    lists, _, _ = _read_dataset_with_schema(test_path)
    if not lists:
        raise CochangeError("test dataset is empty")
    model = load_model(config.out(MODEL_FILE))
    report = importance_report(model, lists, seed=config.rng_seed, repetitions=config.repetitions)
    payload = report.as_dict()
    payload["provenance"] = {
        "config_hash": config.config_hash(),
        "inputs": {
            "dataset-test": file_hash(test_path),
            "model": file_hash(config.out(MODEL_FILE)),
        },
    }
    write_json(config.out(IMPORTANCE_FILE), payload)
    ranked = report.ranked()
    return {
        "baseline_ndcg5": report.baseline_ndcg5,
        "top_feature": ranked[0][0],
        "importance": {name: value for name, value in ranked},
        "output": str(config.out(IMPORTANCE_FILE)),
    }


def run_grid(config: RunConfig) -> dict:
    artifacts = load_project_artifacts(config)
    grid = window_experiment(
        artifacts, config.model,
        train_days=config.grid_train_days,
        test_days=config.grid_test_days,
        k_values=config.k_values,
        blocking=config.blocking,
    )
    payload = grid.as_dict()
    payload["provenance"] = {
        "config_hash": config.config_hash(),
        "inputs": {
            "changesets": file_hash(config.out(CHANGESETS_FILE)),
            "histories": file_hash(config.out(HISTORIES_FILE)),
        },
    }
    write_json(config.out(GRID_FILE), payload)
    attempted = len(grid.cells)
    completed = sum(1 for c in grid.cells if c.status == "ok")
    return {
        "cells_attempted": attempted,
        "cells_completed": completed,
        "cells_skipped": attempted - completed,
        "output": str(config.out(GRID_FILE)),
    }


# --------------------------------------------------------------------------
# interactive ranking


def resolve_query(config: RunConfig, query: str) -> str:
    """Resolve a method id or file:line locator to exactly one method id."""
    _, rows = read_jsonl(config.out(METHODS_FILE), artifact="methods")
    by_id = {row["method_id"]: row for row in rows}
    if query in by_id:
        return query

    if ":" in query:
        path, _, line_text = query.rpartition(":")
        if line_text.isdigit():
            line = int(line_text)
            matches = [
                row["method_id"]
                for row in rows
                if row["file_path"] == path and row["start_line"] <= line <= row["end_line"]
            ]
            if len(matches) == 1:
                return matches[0]
            if len(matches) > 1:
                # innermost (latest-starting) declaration wins: nested methods
                matches.sort(key=lambda mid: by_id[mid]["start_line"])
                return matches[-1]
            raise UnknownQueryError(
                f"no method spans {path}:{line}",
                suggestions=_suggest(rows, path.rsplit("/", 1)[-1]),
            )

    raise UnknownQueryError(f"unknown method {query!r}", suggestions=_suggest(rows, query))


def _suggest(rows, needle: str) -> list[str]:
    needle = needle.lower()
    scored = []
    for row in rows:
        label = f"{row['type_name']}.{row['name']}"
        if needle in label.lower() or needle in row["file_path"].lower():
            scored.append(f"{row['method_id']}  {label}  {row['file_path']}:{row['start_line']}")
    return sorted(scored)[:10]


def run_rank(config: RunConfig, query: str, k: int | None = None) -> dict:
    """Rank co-change candidates for one query using full mined history as
    the feature period."""
    k = k or config.rank_k
    query_id = resolve_query(config, query)
    artifacts = load_project_artifacts(config)
    model = load_model(config.out(MODEL_FILE))

    until = config.until or artifacts.last_commit
    snapshot = artifacts.snapshot_at(until)
    if query_id not in snapshot.methods:
        raise UnknownQueryError(f"method {query_id} is not in the current snapshot")

    ctx = FeatureContext(snapshot, artifacts.change_sets, artifacts.histories,
                         artifacts.repo_creation, until + _ONE_SECOND)
    q_record = snapshot.methods[query_id]
    candidates = []
    for cid in sorted(snapshot.methods):
        if cid == query_id or snapshot.methods[cid].is_test:
            continue
        features = compute_feature_vector(q_record, snapshot.methods[cid], ctx)
        candidates.append(Candidate(id=cid, features=features.as_dict(), label=0))
    if not candidates:
        raise CochangeError("no candidate methods in snapshot")

    rlist = RankingList(query=query_id, window=_rank_window(artifacts, until), candidates=candidates)
    top = rank_candidates(model, rlist, k)
    feature_values = {c.id: c.features for c in candidates}
    results = []
    for cid, score in top:
        record = snapshot.methods[cid]
        results.append(
            {
                "method_id": cid,
                "label": f"{record.type_name}.{record.name}",
                "location": f"{record.file_path}:{record.line_span[0]}",
                "score": score,
                "features": feature_values[cid],
            }
        )
    q = snapshot.methods[query_id]
    return {
        "query": {
            "method_id": query_id,
            "label": f"{q.type_name}.{q.name}",
            "location": f"{q.file_path}:{q.line_span[0]}",
        },
        "k": k,
        "results": results,
    }


def _rank_window(artifacts: ProjectArtifacts, until: datetime) -> WindowConfig:
    return WindowConfig(
        t_s=artifacts.repo_creation,
        t_d=until + _ONE_SECOND,
        t_e=until + 2 * _ONE_SECOND,
    )
