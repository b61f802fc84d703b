import csv
import io
import json
import click
from flask import Blueprint
from srqa.cache import FeatureCache, compute_features
from srqa.commands.decorators import validated_options
from srqa.commands.features.constants import (CSV_COLUMNS, CACHE_WARMED_MESSAGE, CACHE_COUNT_MESSAGE,
                                              FEATURES_WRITTEN_MESSAGE)
from srqa.commands.features.schemas import FeaturesOptionsSchema, CacheWarmOptionsSchema, FeatureRecordSchema
from srqa.core.constants import EXTRACTOR_VERSION, FEATURE_BLOCKS
from srqa.core.features import FEATURE_NAMES
from srqa.core.harness import load_manifest
from srqa.core.regress import BLOCK_SLICES
from srqa.tasks.feature_tasks import warm_feature_cache, CACHED_KEY

features_bp = Blueprint("features", __name__, cli_group=None)


def _named_blocks(values):
    return {block: dict(zip(FEATURE_NAMES[BLOCK_SLICES[block]], map(float, values[BLOCK_SLICES[block]])))
            for block in FEATURE_BLOCKS}


def render_record(image, values, output_format):
    blocks = _named_blocks(values)
    if output_format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for block in FEATURE_BLOCKS:
            writer.writerows((block, name, repr(value)) for name, value in blocks[block].items())
        return buffer.getvalue()
    record = FeatureRecordSchema().dump({"image": image, "extractor_version": EXTRACTOR_VERSION,
                                         "feature_count": len(values), "local": blocks["local"],
                                         "global_": blocks["global"], "spatial": blocks["spatial"]})
    return json.dumps(record, indent=2) + "\n"


@features_bp.cli.command("features")
@click.argument("image", type=click.Path(dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Record file; standard output when omitted.")
@click.option("--format", "output_format", default="json", show_default=True, help="json or csv.")
@click.option("--no-cache", is_flag=True, help="Always recompute instead of using the feature cache.")
@validated_options(FeaturesOptionsSchema())
def features(config):
    """Extract the 138 quality features of IMAGE."""
    image = config["image"]
    values = compute_features(image) if config["no_cache"] else FeatureCache().get_or_compute(image)
    text = render_record(image, values, config["output_format"])
    if config["out"] is None:
        click.echo(text, nl=False)
        return
    with open(config["out"], "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    click.echo(FEATURES_WRITTEN_MESSAGE.format(count=len(values), path=config["out"]))


@features_bp.cli.group("cache")
def cache():
    """Manage the per-image feature cache."""


@cache.command("warm")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@validated_options(CacheWarmOptionsSchema())
def warm(config):
    """Pre-compute features for every image in MANIFEST."""
    entries = load_manifest(config["manifest"])
    summaries = warm_feature_cache(entry.image_path for entry in entries)
    fresh = sum(1 for summary in summaries if not summary[CACHED_KEY])
    click.echo(CACHE_WARMED_MESSAGE.format(count=len(summaries), fresh=fresh))


@cache.command("stats")
def stats():
    """Show how many feature records the cache holds."""
    click.echo(CACHE_COUNT_MESSAGE.format(count=FeatureCache().count(), version=EXTRACTOR_VERSION))
