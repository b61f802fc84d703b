"""Region-wise fusion of candidate SR images.

The frame is cut into a g x g grid; every candidate's version of each cell
(grown by ``overlap`` pixels on interior sides) is scored and the best one
wins the cell. Winning cells are blended with linear feathering across the
overlaps, so each output pixel is a convex combination of candidate pixels.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple

import numpy as np

from srqa.core.constants import (DEFAULT_GRID, DEFAULT_OVERLAP, MIN_CELL_SIZE, FUSION_CANDIDATES_ERROR,
                                 FUSION_SIZE_ERROR, FUSION_CELL_ERROR, FUSION_OVERLAP_ERROR)
from srqa.core.features import extract_features
from srqa.core.imgcore import GrayImage, to_luma
from srqa.core.regress import TwoStageModel, predict_quality
from srqa.errors import FusionError, ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RegionScoreMap:
    grid: int
    winners: np.ndarray
    scores: np.ndarray
    candidate_scores: np.ndarray

    def to_dict(self):
        return {
            "grid": self.grid,
            "winners": self.winners.tolist(),
            "scores": self.scores.tolist(),
            "candidate_scores": self.candidate_scores.tolist(),
        }


@dataclass(frozen=True)
class FusionResult:
    image: np.ndarray
    region_map: RegionScoreMap


@dataclass(frozen=True)
class Cell:
    row: int
    col: int
    core: Tuple[slice, slice]
    region: Tuple[slice, slice]


def model_scorer(model: TwoStageModel) -> Callable[[GrayImage], float]:
    def score(cell: GrayImage) -> float:
        return predict_quality(model, extract_features(cell)).raw
    return score


def _as_values(candidate) -> np.ndarray:
    values = candidate.data if isinstance(candidate, GrayImage) else np.asarray(candidate, dtype=np.float64)
    if values.ndim not in (2, 3) or (values.ndim == 3 and values.shape[2] != 3):
        raise FusionError(f"candidate must be a gray or RGB image, got shape {values.shape}")
    return values


def _luma(values: np.ndarray) -> GrayImage:
    if values.ndim == 3:
        values = to_luma(values[..., 0], values[..., 1], values[..., 2])
    return GrayImage(np.clip(values, 0.0, 1.0))


def grid_cells(shape, grid: int, overlap: int) -> List[Cell]:
    if grid < 1:
        raise ParameterError(f"grid must be >= 1, got {grid}")
    if overlap < 0:
        raise ParameterError(f"overlap must be >= 0, got {overlap}")
    height, width = shape[:2]
    row_edges = np.linspace(0, height, grid + 1).round().astype(int)
    col_edges = np.linspace(0, width, grid + 1).round().astype(int)
    cell_height, cell_width = int(np.diff(row_edges).min()), int(np.diff(col_edges).min())
    if min(cell_height, cell_width) < MIN_CELL_SIZE:
        raise FusionError(FUSION_CELL_ERROR.format(height=cell_height, width=cell_width, minimum=MIN_CELL_SIZE))
    if grid > 1 and 2 * overlap > min(cell_height, cell_width):
        raise FusionError(FUSION_OVERLAP_ERROR.format(overlap=overlap, height=cell_height, width=cell_width))

    cells = []
    for row in range(grid):
        for col in range(grid):
            top, bottom = row_edges[row], row_edges[row + 1]
            left, right = col_edges[col], col_edges[col + 1]
            core = (slice(top, bottom), slice(left, right))
            region = (slice(max(0, top - overlap), min(height, bottom + overlap)),
                      slice(max(0, left - overlap), min(width, right + overlap)))
            cells.append(Cell(row=row, col=col, core=core, region=region))
    return cells


def _ramp(core: slice, region: slice, length: int, overlap: int) -> np.ndarray:
    """Weights along one axis: 1 inside the core, linear ramps across interior overlaps."""
    positions = np.arange(region.start, region.stop) + 0.5
    weights = np.ones(len(positions))
    if overlap == 0:
        return weights
    if core.start > 0:
        weights = np.minimum(weights, np.clip((positions - (core.start - overlap)) / (2 * overlap), 0.0, 1.0))
    if core.stop < length:
        weights = np.minimum(weights, np.clip(((core.stop + overlap) - positions) / (2 * overlap), 0.0, 1.0))
    return weights


def feather_weights(cell: Cell, shape, overlap: int) -> np.ndarray:
    height, width = shape[:2]
    return np.outer(_ramp(cell.core[0], cell.region[0], height, overlap),
                    _ramp(cell.core[1], cell.region[1], width, overlap))


def grid_fuse(candidates: Sequence, model: TwoStageModel = None, grid: int = DEFAULT_GRID,
              overlap: int = DEFAULT_OVERLAP, scorer: Callable[[GrayImage], float] = None,
              threads: int = 1) -> FusionResult:
    if len(candidates) < 2:
        raise FusionError(FUSION_CANDIDATES_ERROR.format(count=len(candidates)))
    if scorer is None:
        if model is None:
            raise ParameterError("grid_fuse needs a model or a scorer")
        scorer = model_scorer(model)
    images = [_as_values(candidate) for candidate in candidates]
    shape = images[0].shape
    for index, image in enumerate(images):
        if image.shape != shape:
            raise FusionError(FUSION_SIZE_ERROR.format(index=index, shape=image.shape, expected=shape))

    cells = grid_cells(shape, grid, overlap)
    lumas = [_luma(image) for image in images]
    jobs = [(cell, index) for cell in cells for index in range(len(images))]

    def score(job):
        cell, index = job
        return scorer(GrayImage(lumas[index].data[cell.region]))

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        flat_scores = list(pool.map(score, jobs))

    candidate_scores = np.array(flat_scores, dtype=np.float64).reshape(grid, grid, len(images))
    # argmax keeps the first maximum, so ties go to the lowest candidate index
    winners = np.argmax(candidate_scores, axis=2)
    best = np.take_along_axis(candidate_scores, winners[..., np.newaxis], axis=2)[..., 0]

    accumulated = np.zeros(shape, dtype=np.float64)
    total = np.zeros(shape[:2], dtype=np.float64)
    for cell in cells:
        weights = feather_weights(cell, shape, overlap)
        patch = images[winners[cell.row, cell.col]][cell.region]
        accumulated[cell.region] += patch * (weights[..., np.newaxis] if patch.ndim == 3 else weights)
        total[cell.region] += weights
    fused = accumulated / (total[..., np.newaxis] if accumulated.ndim == 3 else total)

    logger.info(f"Fused {len(images)} candidates on a {grid}x{grid} grid; winners {winners.tolist()}")
    return FusionResult(image=fused, region_map=RegionScoreMap(grid=grid, winners=winners, scores=best,
                                                               candidate_scores=candidate_scores))
