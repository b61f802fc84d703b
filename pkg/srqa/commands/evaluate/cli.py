import os
import click
from flask import Blueprint
from srqa.commands.decorators import validated_options, resolve_threads
from srqa.commands.evaluate.constants import REPORT_WRITTEN_MESSAGE, AGGREGATED_MESSAGE, SYNTH_WRITTEN_MESSAGE
from srqa.commands.evaluate.schemas import EvaluateOptionsSchema, AggregateOptionsSchema, SynthOptionsSchema
from srqa.commands.model.cli import forest_options, drop_unset, forest_params, entry_extractor
from srqa.core.harness import (load_manifest, aggregate_ratings, write_manifest, run_protocol, format_report,
                               write_report)
from srqa.core.synth import build_synthetic_dataset

evaluate_bp = Blueprint("evaluate", __name__, cli_group=None)


@evaluate_bp.cli.command("evaluate")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--protocol", default=None, help="5fold, kfold, leave-image-out or leave-method-out [default: 5fold].")
@click.option("--folds", type=int, default=None, help="k for the kfold protocol [default: 5].")
@click.option("--image-holdout", type=int, default=None, help="Reference images held out per split [default: 6].")
@click.option("--method-holdout", type=int, default=None, help="SR methods held out per split [default: 2].")
@click.option("--repetitions", type=int, default=None, help="Repetitions averaged per image [default: 100].")
@click.option("--out", type=click.Path(file_okay=False), default=None, help="Report directory [default: report].")
@forest_options
def evaluate(**options):
    """Run a validation protocol over MANIFEST and report rank correlations."""
    return _evaluate(**drop_unset(options))


@validated_options(EvaluateOptionsSchema())
def _evaluate(config):
    entries = load_manifest(config["manifest"])
    report = run_protocol(entries, config["protocol"], folds=config["folds"], image_holdout=config["image_holdout"],
                          method_holdout=config["method_holdout"], trees=config["trees"],
                          params=forest_params(config), repetitions=config["repetitions"], seed=config["seed"],
                          kind=config["kind"], threads=resolve_threads(config["threads"]),
                          extractor=entry_extractor(config))
    paths = write_report(report, config["out"])
    click.echo(format_report(report))
    click.echo(REPORT_WRITTEN_MESSAGE.format(paths=", ".join(paths.values())))


@evaluate_bp.cli.command("aggregate")
@click.argument("ratings", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Manifest CSV to write.")
@validated_options(AggregateOptionsSchema())
def aggregate(config):
    """Turn per-rating rows into a manifest of trimmed-mean perceptual scores."""
    entries = aggregate_ratings(config["ratings"])
    write_manifest(entries, config["out"])
    click.echo(AGGREGATED_MESSAGE.format(count=len(entries), path=config["out"]))


@evaluate_bp.cli.command("synth")
@click.argument("out_dir", type=click.Path(file_okay=False))
@click.option("--source", multiple=True, type=click.Path(exists=True, dir_okay=False),
              help="Reference image; repeat for several. Dead-leaves images are generated when omitted.")
@click.option("--scale", multiple=True, type=int, help="Scale factor; repeat for several [default: 2 3 4].")
@click.option("--count", type=int, default=None, help="Generated references when no --source [default: 5].")
@click.option("--size", type=int, default=None, help="Side of generated references [default: 192].")
@click.option("--seed", type=int, default=None, help="Seed for images and score noise [default: 0].")
def synth(**options):
    """Build a desk-scale degraded dataset and its manifest under OUT_DIR."""
    options = drop_unset(options)
    for key in ("source", "scale"):
        if not options.get(key):
            options.pop(key, None)
    return _synth(**options)


@validated_options(SynthOptionsSchema())
def _synth(config):
    manifest_path = build_synthetic_dataset(config["out_dir"], sources=config["source"],
                                            scales=tuple(config["scale"]), seed=config["seed"],
                                            count=config["count"], size=config["size"])
    count = len(load_manifest(manifest_path, check_files=False))
    click.echo(SYNTH_WRITTEN_MESSAGE.format(count=count, path=os.path.abspath(manifest_path)))
