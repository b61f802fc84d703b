"""Local frequency features: statistics of 7x7 block DCT coefficients pooled over
each level of a three-level Gaussian pyramid."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import fft

from srqa.core.constants import (DCT_BLOCK_SIZE, DCT_MEAN_GUARD, POOL_FRACTION, PYRAMID_LEVELS, LOCAL_FEATURE_DIM,
                                 DCT_BLOCK_SHAPE_ERROR, UNDERSIZED_IMAGE_ERROR)
from srqa.core.imgcore import GrayImage, as_array, build_pyramid
from srqa.core.stats import ggd_shapes
from srqa.errors import ImageError, UndersizedImageError

logger = logging.getLogger(__name__)

_ROWS, _COLS = np.indices((DCT_BLOCK_SIZE, DCT_BLOCK_SIZE))
_INDEX_SUM = _ROWS + _COLS
# radial bands by index sum; DC (d = 0) belongs to none
LOW_MASK = (_INDEX_SUM >= 1) & (_INDEX_SUM <= 3)
MID_MASK = (_INDEX_SUM >= 4) & (_INDEX_SUM <= 6)
HIGH_MASK = _INDEX_SUM >= 7
AC_MASK = _INDEX_SUM >= 1


@dataclass(frozen=True)
class DctBlockStats:
    gamma: np.ndarray
    sigma_bar: np.ndarray
    Sigma: np.ndarray

    def __len__(self):
        return len(self.gamma)


@dataclass(frozen=True)
class LocalFeatures:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (LOCAL_FEATURE_DIM,):
            raise ValueError(f"local features must have {LOCAL_FEATURE_DIM} values, got {values.shape}")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return LOCAL_FEATURE_DIM


def block_dct(block) -> np.ndarray:
    block = np.asarray(block, dtype=np.float64)
    if block.shape != (DCT_BLOCK_SIZE, DCT_BLOCK_SIZE):
        raise ImageError(DCT_BLOCK_SHAPE_ERROR.format(size=DCT_BLOCK_SIZE, shape=block.shape))
    return fft.dctn(block, type=2, norm="ortho")


def group_coefficients(coeffs) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    coeffs = np.asarray(coeffs)
    return coeffs[LOW_MASK], coeffs[MID_MASK], coeffs[HIGH_MASK]


def tile_blocks(values: np.ndarray, size: int = DCT_BLOCK_SIZE) -> np.ndarray:
    """Non-overlapping size x size tiles, partial tiles at the right and bottom dropped."""
    rows, cols = values.shape[0] // size, values.shape[1] // size
    if rows == 0 or cols == 0:
        raise UndersizedImageError(UNDERSIZED_IMAGE_ERROR.format(
            height=values.shape[0], width=values.shape[1], min_height=size, min_width=size))
    trimmed = values[:rows * size, :cols * size]
    return trimmed.reshape(rows, size, cols, size).swapaxes(1, 2).reshape(-1, size, size)


def _dispersion(magnitudes: np.ndarray) -> np.ndarray:
    mean = magnitudes.mean(axis=1)
    spread = magnitudes.std(axis=1)
    safe = np.where(mean < DCT_MEAN_GUARD, 1.0, mean)
    return np.where(mean < DCT_MEAN_GUARD, 0.0, spread / safe)


def block_statistics(values) -> DctBlockStats:
    blocks = tile_blocks(as_array(values))
    coeffs = fft.dctn(blocks, type=2, norm="ortho", axes=(1, 2))
    ac = coeffs[:, AC_MASK]
    magnitudes = np.abs(coeffs)
    per_set = np.stack([_dispersion(magnitudes[:, mask]) for mask in (LOW_MASK, MID_MASK, HIGH_MASK)], axis=1)
    return DctBlockStats(gamma=ggd_shapes(ac), sigma_bar=_dispersion(np.abs(ac)), Sigma=per_set.std(axis=1))


def _decile_count(count: int) -> int:
    return max(1, int(POOL_FRACTION * count))


def pool_lowest(values: np.ndarray) -> float:
    return float(np.sort(values)[:_decile_count(values.size)].mean())


def pool_highest(values: np.ndarray) -> float:
    return float(np.sort(values)[-_decile_count(values.size):].mean())


def level_features(stats: DctBlockStats) -> Tuple[float, ...]:
    return (float(stats.gamma.mean()), pool_lowest(stats.gamma),
            float(stats.sigma_bar.mean()), pool_highest(stats.sigma_bar),
            float(stats.Sigma.mean()), pool_highest(stats.Sigma))


def local_features(image) -> LocalFeatures:
    image = image if isinstance(image, GrayImage) else GrayImage(image)
    pyramid = build_pyramid(image, PYRAMID_LEVELS)
    values = []
    for index, level in enumerate(pyramid):
        stats = block_statistics(level)
        logger.debug(f"Level {index}: {len(stats)} DCT blocks")
        values.extend(level_features(stats))
    return LocalFeatures(np.array(values))
