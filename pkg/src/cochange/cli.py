"""Command-line entry point.

Pipeline stages are separate subcommands (mine -> dataset -> train ->
evaluate / importance / grid / rank) so experiments can reuse mined
artifacts. Option precedence is CLI > config file > defaults; the API token
is read from the GITHUB_TOKEN environment variable.
"""

import json
import logging
import sys

import click

from . import __version__
from .config import resolve_config
from .errors import (
    ApiError,
    AuthError,
    CochangeError,
    ConfigError,
    GitError,
    InsufficientHistoryError,
    MissingArtifactError,
    NotARepositoryError,
    SchemaError,
    UnknownQueryError,
)

EXIT_CODES = [
    ((ConfigError,), 2),
    ((MissingArtifactError,), 3),
    ((SchemaError,), 4),
    ((InsufficientHistoryError,), 5),
    ((NotARepositoryError, GitError), 6),
    ((AuthError, ApiError), 7),
    ((UnknownQueryError,), 8),
]
GENERIC_ERROR_EXIT = 9


def _fail(stage: str, exc: CochangeError):
    click.echo(f"error [{stage}]: {exc}", err=True)
    if isinstance(exc, UnknownQueryError) and exc.suggestions:
        click.echo("did you mean:", err=True)
        for line in exc.suggestions:
            click.echo(f"  {line}", err=True)
    for types, code in EXIT_CODES:
        if isinstance(exc, types):
            sys.exit(code)
    sys.exit(GENERIC_ERROR_EXIT)


def _run_stage(stage: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except CochangeError as exc:
        _fail(stage, exc)


def _echo_result(result: dict, as_json: bool):
    if as_json:
        click.echo(json.dumps(result, indent=2, default=str))
    else:
        for key, value in result.items():
            click.echo(f"{key}: {value}")


_global_options = [
    click.option("--config", "config_file", type=click.Path(), help="INI config file."),
    click.option("--repo", "repo_path", type=click.Path(), help="Path to the git repository."),
    click.option("--output-dir", type=click.Path(), help="Artifact directory."),
    click.option("--seed", type=int, help="RNG seed."),
    click.option("--jobs", type=int, help="Worker count (0 = all cores)."),
    click.option("--json", "as_json", is_flag=True, default=False, help="Machine-readable output."),
]


def global_options(fn):
    for opt in reversed(_global_options):
        fn = opt(fn)
    return fn


def _config(config_file, **overrides):
    try:
        return resolve_config(config_file, **overrides)
    except CochangeError as exc:
        _fail("config", exc)


@click.group()
@click.version_option(version=__version__)
def main():
    """Mine method-level co-change history and rank likely co-changes."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


@main.command()
@global_options
@click.option("--until", help="Ignore commits after this ISO-8601 instant.")
@click.option("--mapping-source", type=click.Choice(["auto", "offline", "api", "merge"]),
              help="Pull-request mapping provider.")
@click.option("--mapping-file", type=click.Path(), help="Offline PR mapping (JSONL).")
@click.option("--github-repo", help="owner/name for --mapping-source=api.")
def mine(config_file, as_json, **overrides):
    """Mine commits, change sets, method histories, and the head snapshot."""
    config = _config(config_file, **overrides)
    from .pipeline import run_mine

    result = _run_stage("mine", run_mine, config)
    _echo_result(result, as_json)


@main.command()
@global_options
@click.option("--train-days", "train_label_days", type=int, help="Training label period (days).")
@click.option("--test-days", "test_label_days", type=int, help="Test label period (days).")
@click.option("--blocking/--no-blocking", default=None, help="Candidate blocking pre-filter.")
@click.option("--embedding-provider", type=click.Choice(["fallback", "file"]))
@click.option("--embeddings-file", type=click.Path(), help="embeddings.jsonl from the exporter.")
def dataset(config_file, as_json, **overrides):
    """Build the labeled train/test ranking datasets."""
    config = _config(config_file, **overrides)
    from .pipeline import run_dataset

    result = _run_stage("dataset", run_dataset, config)
    _echo_result(result, as_json)


@main.command()
@global_options
@click.option("--model", "model_type", type=click.Choice(["linear", "mart", "random-forest", "coordinate-ascent"]),
              help="Ranker family.")
def train(config_file, as_json, **overrides):
    """Train the configured ranking model on the training dataset."""
    config = _config(config_file, **overrides)
    from .pipeline import run_train

    result = _run_stage("train", run_train, config)
    _echo_result(result, as_json)


@main.command()
@global_options
@click.option("--scorer", default="model",
              type=click.Choice(["model", "oracle", "support", "proximity", "clone"]),
              help="Model or baseline to evaluate.")
def evaluate(config_file, as_json, scorer, **overrides):
    """Evaluate NDCG@k on the test dataset and write report.json."""
    config = _config(config_file, **overrides)
    from .pipeline import run_evaluate

    result = _run_stage("evaluate", run_evaluate, config, scorer=scorer)
    _echo_result(result, as_json)


@main.command()
@global_options
@click.option("--repetitions", type=int, help="Shuffles per feature (averaged).")
def importance(config_file, as_json, **overrides):
    """Permutation importance of every model feature (NDCG@5 drop)."""
    config = _config(config_file, **overrides)
    from .pipeline import run_importance

    result = _run_stage("importance", run_importance, config)
    _echo_result(result, as_json)


@main.command()
@global_options
@click.option("--train-days", "grid_train_days", help="Comma-separated training periods.")
@click.option("--test-days", "grid_test_days", help="Comma-separated test periods.")
def grid(config_file, as_json, **overrides):
    """Run the train/test window grid experiment and write grid.json."""
    config = _config(config_file, **overrides)
    from .pipeline import run_grid

    result = _run_stage("grid", run_grid, config)
    _echo_result(result, as_json)


@main.command()
@global_options
@click.argument("query")
@click.option("-k", "top_k", type=int, default=None, help="Number of candidates (default 5).")
def rank(config_file, as_json, query, top_k, **overrides):
    """Rank likely co-changes for QUERY (a method id or file.java:line)."""
    config = _config(config_file, **overrides)
    from .pipeline import run_rank

    result = _run_stage("rank", run_rank, config, query, k=top_k)
    if as_json:
        click.echo(json.dumps(result, indent=2))
        return
    q = result["query"]
    click.echo(f"query: {q['label']} ({q['location']})")
    click.echo(f"top {result['k']} likely co-changes:")
    for i, row in enumerate(result["results"], 1):
        click.echo(f"{i:2d}. {row['label']:40s} score={row['score']:.4f}  {row['location']}")
        contributing = {
            name: value
            for name, value in row["features"].items()
            if isinstance(value, bool) and value or (not isinstance(value, bool) and value != 0)
        }
        if contributing:
            details = ", ".join(f"{n}={v:.3g}" if isinstance(v, float) else f"{n}={v}"
                                for n, v in sorted(contributing.items()))
            click.echo(f"      {details}")


if __name__ == "__main__":
    main()
