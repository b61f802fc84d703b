"""Desk-scale SR dataset: synthetic degradations with pseudo-perceptual scores."""
import logging
import os
from typing import List, Optional, Sequence

import numpy as np
from scipy import ndimage

from srqa.core.constants import (SCALE_SIGMA_PAIRS, SCORE_MIN, SCORE_MAX, SYNTH_SCORE_GUIDE, SYNTH_METHOD_SHIFTS,
                                 SYNTH_NOISE, SYNTH_CROP_MULTIPLE, SYNTH_DEFAULT_SCALES, SYNTH_DEFAULT_SOURCES,
                                 SYNTH_DEFAULT_SIZE, BACK_PROJECTION_ITERATIONS, DEAD_LEAVES_MIN_RADIUS, SCALE_ERROR)
from srqa.core.harness import ManifestEntry, write_manifest
from srqa.core.imgcore import GrayImage, as_array, center_crop, downsample, load_image, save_image
from srqa.errors import ParameterError

logger = logging.getLogger(__name__)

UPSAMPLERS = tuple(SYNTH_METHOD_SHIFTS)


def dead_leaves(size: int, seed=0, min_radius: float = DEAD_LEAVES_MIN_RADIUS) -> GrayImage:
    """Occluding random discs with power-law radii; edge and texture statistics resemble photographs."""
    rng = np.random.default_rng(seed)
    max_radius = size / 4.0
    canvas = np.full((size, size), rng.uniform(0.2, 0.8))
    rows, cols = np.mgrid[0:size, 0:size]
    count = int(24 * size * size / (np.pi * min_radius * max_radius))
    # density proportional to r^-3 between min_radius and max_radius
    radii = min_radius / np.sqrt(1.0 - rng.uniform(0.0, 1.0 - (min_radius / max_radius) ** 2, count))
    centers = rng.uniform(-max_radius, size + max_radius, (count, 2))
    shades = rng.uniform(0.0, 1.0, count)
    for radius, (cy, cx), shade in zip(radii, centers, shades):
        top, bottom = max(0, int(cy - radius)), min(size, int(cy + radius) + 1)
        left, right = max(0, int(cx - radius)), min(size, int(cx + radius) + 1)
        if top >= bottom or left >= right:
            continue
        window = (slice(top, bottom), slice(left, right))
        inside = (rows[window] - cy) ** 2 + (cols[window] - cx) ** 2 <= radius ** 2
        canvas[window][inside] = shade
    return GrayImage(np.clip(ndimage.gaussian_filter(canvas, 0.6, mode="reflect"), 0.0, 1.0))


def _upscale(values: np.ndarray, s: int, order: int) -> np.ndarray:
    return np.clip(ndimage.zoom(values, s, order=order, mode="reflect", grid_mode=True), 0.0, 1.0)


def back_projection(lr, s: int, sigma: float, iterations: int = BACK_PROJECTION_ITERATIONS) -> GrayImage:
    """Iterative back-projection: refine a bicubic estimate until it re-images onto ``lr``."""
    if int(s) != s or s < 2:
        raise ParameterError(SCALE_ERROR.format(s=s))
    low = as_array(lr)
    estimate = _upscale(low, int(s), 3)
    for _ in range(iterations):
        residual = low - downsample(GrayImage(estimate), s, sigma).data
        estimate = np.clip(estimate + ndimage.zoom(residual, s, order=3, mode="reflect", grid_mode=True), 0.0, 1.0)
    return GrayImage(estimate)


def upsample(lr, s: int, sigma: float, method: str) -> GrayImage:
    low = as_array(lr)
    if method == "nearest":
        return GrayImage(_upscale(low, s, 0))
    if method == "bilinear":
        return GrayImage(_upscale(low, s, 1))
    if method == "backprojection":
        return back_projection(low, s, sigma)
    raise ParameterError(f"unknown upsampler {method}; expected one of {', '.join(UPSAMPLERS)}")


def pseudo_score(s: int, method: str, rng: np.random.Generator) -> float:
    score = SYNTH_SCORE_GUIDE[s] + SYNTH_METHOD_SHIFTS[method] + rng.uniform(-SYNTH_NOISE, SYNTH_NOISE)
    return float(np.clip(score, SCORE_MIN, SCORE_MAX))


def build_synthetic_dataset(out_dir, sources: Optional[Sequence[str]] = None, scales=SYNTH_DEFAULT_SCALES, seed=0,
                            count: int = SYNTH_DEFAULT_SOURCES, size: int = SYNTH_DEFAULT_SIZE) -> str:
    """Write degraded images and ``manifest.csv`` under ``out_dir``; returns the manifest path."""
    for s in scales:
        if s not in SYNTH_SCORE_GUIDE or s not in SCALE_SIGMA_PAIRS:
            raise ParameterError(f"no scoring guide for scale {s}; supported: {sorted(SYNTH_SCORE_GUIDE)}")
    image_dir = os.path.join(out_dir, "images")
    os.makedirs(image_dir, exist_ok=True)
    rng = np.random.default_rng(seed)

    if sources:
        references = [load_image(path) for path in sources]
    else:
        references = [dead_leaves(size, seed=[seed, index]) for index in range(count)]

    entries: List[ManifestEntry] = []
    for index, reference in enumerate(references):
        ref_id = f"ref{index:02d}"
        hr = GrayImage(center_crop(reference.data, SYNTH_CROP_MULTIPLE))
        save_image(hr, os.path.join(image_dir, f"{ref_id}_hr.png"))
        for s in scales:
            sigma = SCALE_SIGMA_PAIRS[s]
            lr = downsample(hr, s, sigma)
            for method in UPSAMPLERS:
                path = os.path.join(image_dir, f"{ref_id}_{method}_x{s}.png")
                save_image(upsample(lr, s, sigma, method), path)
                entries.append(ManifestEntry(image_path=os.path.abspath(path), ref_id=ref_id, method=method, s=s,
                                             sigma=sigma, score=pseudo_score(s, method, rng)))
        logger.info(f"Built degradations for {ref_id}")

    manifest_path = os.path.join(out_dir, "manifest.csv")
    write_manifest(entries, manifest_path)
    logger.info(f"Wrote {len(entries)} entries to {manifest_path}")
    return manifest_path
