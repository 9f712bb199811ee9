"""CLI mirroring the export manifest fields."""

import json
import logging
import sys

import click

from .encoders import EncoderUnavailable
from .exporter import export_embeddings
from .manifest import ExportManifest


@click.command()
@click.option("--input", "input_path", required=True, type=click.Path(exists=True),
              help="methods.jsonl produced by the mining pipeline.")
@click.option("--output", "output_path", required=True, type=click.Path(),
              help="embeddings.jsonl to write.")
@click.option("--model", "model_identifier", default="hashed", show_default=True,
              help="Encoder: a transformers model id/path, or 'hashed[:dim]' for the "
                   "deterministic offline backend.")
@click.option("--dim", "dimension", default=0, show_default=True,
              help="Expected vector width (0 = accept the encoder's width).")
@click.option("--pooling", type=click.Choice(["first-token", "mean"]), default="first-token",
              show_default=True)
@click.option("--batch-size", default=16, show_default=True)
def main(**kwargs):
    """Export method embeddings for the co-change ranking pipeline."""
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    try:
        manifest = ExportManifest(**kwargs)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    try:
        summary = export_embeddings(manifest)
    except EncoderUnavailable as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(3)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
