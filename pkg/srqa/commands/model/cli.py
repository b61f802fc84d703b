import json
import click
from flask import Blueprint
from srqa.cache import FeatureCache, compute_features
from srqa.commands.decorators import validated_options, resolve_threads
from srqa.commands.model.constants import MODEL_TRAINED_MESSAGE, SCORE_FORMAT
from srqa.commands.model.schemas import TrainOptionsSchema, PredictOptionsSchema, QualityPredictionSchema
from srqa.core.harness import load_manifest, feature_matrix, extract_entry_features
from srqa.core.regress import ForestParams, train_two_stage, predict_quality, save_model, load_model

model_bp = Blueprint("model", __name__, cli_group=None)


def forest_options(f):
    """Options shared by every command that grows forests."""
    options = [
        click.option("--trees", type=int, default=None, help="Trees per forest [default: 2000]."),
        click.option("--seed", type=int, default=None, help="Seed for every random draw [default: 0]."),
        click.option("--kind", default=None, help="two_stage, concat, local, global or spatial."),
        click.option("--min-leaf", type=int, default=None, help="Minimum samples per leaf [default: 5]."),
        click.option("--subsample", type=float, default=None, help="Bootstrap sample fraction [default: 1.0]."),
        click.option("--no-bootstrap", is_flag=True, help="Grow every tree on all rows."),
        click.option("--threads", type=int, default=None, help="Worker cap [default: SRQA_THREADS]."),
        click.option("--no-cache", is_flag=True, help="Recompute features instead of using the cache."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def drop_unset(options):
    return {key: value for key, value in options.items() if value is not None}


def forest_params(config):
    return ForestParams(min_leaf=config["min_leaf"], subsample=config["subsample"],
                        bootstrap=not config["no_bootstrap"])


def entry_extractor(config):
    return extract_entry_features if config["no_cache"] else FeatureCache().entry_extractor()


@model_bp.cli.command("train")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Model file to write.")
@forest_options
def train(**options):
    """Train a quality model on the images and scores of MANIFEST."""
    return _train(**drop_unset(options))


@validated_options(TrainOptionsSchema())
def _train(config):
    entries = load_manifest(config["manifest"])
    X = feature_matrix(entries, entry_extractor(config))
    y = [entry.score for entry in entries]
    model = train_two_stage(X, y, trees=config["trees"], params=forest_params(config), seed=config["seed"],
                            kind=config["kind"], threads=resolve_threads(config["threads"]))
    save_model(model, config["out"])
    click.echo(MODEL_TRAINED_MESSAGE.format(kind=model.kind, rows=len(entries), trees=config["trees"],
                                            path=config["out"]))


@model_bp.cli.command("predict")
@click.argument("model", type=click.Path(exists=True, dir_okay=False))
@click.argument("image", type=click.Path(dir_okay=False))
@click.option("--json", "as_json", is_flag=True, help="Print raw and per-forest predictions as JSON.")
@validated_options(PredictOptionsSchema())
def predict(config):
    """Print the predicted quality score of IMAGE in [0, 10]."""
    model = load_model(config["model"])
    prediction = predict_quality(model, compute_features(config["image"]))
    if not config["as_json"]:
        click.echo(SCORE_FORMAT.format(score=prediction.score))
        return
    document = QualityPredictionSchema().dump({
        "image": config["image"], "score": prediction.score, "raw": prediction.raw,
        "per_forest": dict(zip(model.blocks, map(float, prediction.per_forest)))})
    click.echo(json.dumps(document, indent=2))
