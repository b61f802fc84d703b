import json
import os
import click
from flask import Blueprint
from srqa.commands.decorators import validated_options, resolve_threads
from srqa.commands.imaging.constants import REGION_MAP_SUFFIX, DOWNSAMPLED_MESSAGE, FUSED_MESSAGE, NO_SIGMA_ERROR
from srqa.commands.imaging.schemas import DownsampleOptionsSchema, FuseOptionsSchema, RegionScoreMapSchema
from srqa.core.constants import SCALE_SIGMA_PAIRS
from srqa.core.fusion import grid_fuse
from srqa.core.imgcore import load_image, load_color, save_image, downsample as downsample_image
from srqa.core.regress import load_model
from srqa.errors import ParameterError

imaging_bp = Blueprint("imaging", __name__, cli_group=None)


def region_map_path(out):
    return os.path.splitext(out)[0] + REGION_MAP_SUFFIX


@imaging_bp.cli.command("downsample")
@click.argument("image", type=click.Path(dir_okay=False))
@click.option("--scale", "-s", "scale", type=int, required=True, help="Integer scale factor.")
@click.option("--sigma", type=float, default=None, help="Blur width; the standard pair for --scale when omitted.")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="LR PNG to write.")
@validated_options(DownsampleOptionsSchema())
def downsample(config):
    """Blur and decimate IMAGE into a low-resolution PNG."""
    s, sigma = config["scale"], config["sigma"]
    if sigma is None:
        if s not in SCALE_SIGMA_PAIRS:
            raise ParameterError(NO_SIGMA_ERROR.format(s=s, pairs=SCALE_SIGMA_PAIRS))
        sigma = SCALE_SIGMA_PAIRS[s]
    image = load_image(config["image"])
    low = downsample_image(image, s, sigma)
    save_image(low, config["out"])
    click.echo(DOWNSAMPLED_MESSAGE.format(height=image.height, width=image.width, out_height=low.height,
                                          out_width=low.width, s=s, sigma=sigma, path=config["out"]))


@imaging_bp.cli.command("fuse")
@click.argument("images", nargs=-1, type=click.Path(dir_okay=False))
@click.option("--model", type=click.Path(exists=True, dir_okay=False), required=True, help="Quality model file.")
@click.option("--grid", type=int, default=None, help="Cells per side [default: 3].")
@click.option("--overlap", type=int, default=None, help="Feathered overlap in pixels [default: 16].")
@click.option("--threads", type=int, default=None, help="Worker cap [default: SRQA_THREADS].")
@click.option("--out", type=click.Path(dir_okay=False), required=True,
              help="Fused PNG; the region map goes to <out>.json.")
def fuse(**options):
    """Fuse candidate SR IMAGES cell by cell, keeping the best-scored region."""
    options["images"] = list(options["images"])
    return _fuse(**{key: value for key, value in options.items() if value is not None})


@validated_options(FuseOptionsSchema())
def _fuse(config):
    model = load_model(config["model"])
    candidates = [load_color(path) for path in config["images"]]
    result = grid_fuse(candidates, model=model, grid=config["grid"], overlap=config["overlap"],
                       threads=resolve_threads(config["threads"]))
    save_image(result.image, config["out"])
    document = RegionScoreMapSchema().dump(dict(result.region_map.to_dict(), candidates=config["images"],
                                                overlap=config["overlap"]))
    with open(region_map_path(config["out"]), "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=2)
    click.echo(FUSED_MESSAGE.format(count=len(candidates), grid=config["grid"], path=config["out"]))
