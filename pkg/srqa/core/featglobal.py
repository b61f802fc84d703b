"""Global frequency features from a complex steerable pyramid.

Each band is divisively normalized by a Gaussian-scale-mixture estimate of its
local mixer before GGD shapes are fitted; correlations are measured between
band magnitudes.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import linalg

from srqa.core.constants import (NEIGHBORHOOD_SIZE, ZHAT_FLOOR, COVARIANCE_RIDGE, VARIANCE_FLOOR, GLOBAL_FEATURE_DIM,
                                 DEGENERATE_GAMMA, DEGENERATE_CORRELATION, DEGENERATE_BAND_ERROR,
                                 SHAPE_MISMATCH_ERROR)
from srqa.core.imgcore import GrayImage
from srqa.core.stats import fit_ggd, structural_correlation
from srqa.core.steerpyr import SteerableDecomposition, decompose
from srqa.errors import DegenerateBandError, StatsError

logger = logging.getLogger(__name__)

SPATIAL_OFFSETS = tuple((dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1))
ADJACENT_OFFSETS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class NeighborhoodSpec:
    """Slot layout of a neighborhood vector.

    0-8: 3x3 block of the band itself, row-major, centre at slot 4.
    9-13: the next orientation's band at centre, up, down, left, right.
    14: parent (next coarser scale, or the lowpass residual at the coarsest scale).
    """
    spatial: Tuple[Tuple[int, int], ...] = SPATIAL_OFFSETS
    adjacent: Tuple[Tuple[int, int], ...] = ADJACENT_OFFSETS
    center_slot: int = 4

    @property
    def size(self) -> int:
        return len(self.spatial) + len(self.adjacent) + 1


NEIGHBORHOOD = NeighborhoodSpec()


@dataclass(frozen=True)
class GsmNormalizedBand:
    values: np.ndarray
    zhat: np.ndarray


@dataclass(frozen=True)
class GlobalFeatures:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (GLOBAL_FEATURE_DIM,):
            raise ValueError(f"global features must have {GLOBAL_FEATURE_DIM} values, got {values.shape}")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return GLOBAL_FEATURE_DIM

    @property
    def band_gammas(self) -> np.ndarray:
        return self.values[:12]

    @property
    def orientation_gammas(self) -> np.ndarray:
        return self.values[12:18]

    @property
    def scale_correlations(self) -> np.ndarray:
        return self.values[18:30]

    @property
    def orientation_correlations(self) -> np.ndarray:
        return self.values[30:45]


def _shifted(padded: np.ndarray, shape, dr: int, dc: int) -> np.ndarray:
    rows, cols = shape
    return padded[1 + dr:1 + dr + rows, 1 + dc:1 + dc + cols]


def upsample_nearest(values: np.ndarray, shape) -> np.ndarray:
    """Nearest mapping: target (y, x) reads source (floor(y h / H), floor(x w / W))."""
    rows = (np.arange(shape[0]) * values.shape[0]) // shape[0]
    cols = (np.arange(shape[1]) * values.shape[1]) // shape[1]
    return values[np.ix_(rows, cols)]


def build_neighborhoods(decomp: SteerableDecomposition, scale: int, orientation: int) -> np.ndarray:
    """One neighborhood vector per band position, as an (H*W, 15) matrix."""
    band = np.real(decomp.band(scale, orientation))
    adjacent = np.real(decomp.band(scale, (orientation + 1) % decomp.orientations))
    if scale + 1 < decomp.scales:
        parent = np.real(decomp.band(scale + 1, orientation))
    else:
        parent = np.real(decomp.lowpass)

    shape = band.shape
    band_padded = np.pad(band, 1, mode="symmetric")
    adjacent_padded = np.pad(adjacent, 1, mode="symmetric")
    columns = [_shifted(band_padded, shape, dr, dc) for dr, dc in NEIGHBORHOOD.spatial]
    columns += [_shifted(adjacent_padded, shape, dr, dc) for dr, dc in NEIGHBORHOOD.adjacent]
    columns.append(upsample_nearest(parent, shape))
    return np.stack([column.ravel() for column in columns], axis=1)


def neighborhood_covariance(neighborhoods: np.ndarray) -> np.ndarray:
    return np.cov(neighborhoods, rowvar=False)


def divisive_normalize(band, neighborhoods: np.ndarray, Q: Optional[np.ndarray] = None) -> GsmNormalizedBand:
    band = np.real(np.asarray(band))
    neighborhoods = np.asarray(neighborhoods, dtype=np.float64)
    if neighborhoods.shape != (band.size, NEIGHBORHOOD_SIZE):
        raise StatsError(SHAPE_MISMATCH_ERROR.format(left=neighborhoods.shape, right=(band.size, NEIGHBORHOOD_SIZE)))
    Q = neighborhood_covariance(neighborhoods) if Q is None else np.asarray(Q, dtype=np.float64)
    trace = float(np.trace(Q))
    if not np.all(np.isfinite(Q)) or trace <= VARIANCE_FLOOR:
        raise DegenerateBandError(DEGENERATE_BAND_ERROR)
    ridge = COVARIANCE_RIDGE * trace / NEIGHBORHOOD_SIZE
    regularized = 0.5 * (Q + Q.T) + ridge * np.eye(NEIGHBORHOOD_SIZE)
    try:
        factor = linalg.cho_factor(regularized)
    except linalg.LinAlgError as error:
        raise DegenerateBandError(DEGENERATE_BAND_ERROR) from error
    solved = linalg.cho_solve(factor, neighborhoods.T).T
    zhat = np.sqrt(np.maximum(np.sum(neighborhoods * solved, axis=1), 0.0) / NEIGHBORHOOD_SIZE)
    values = band.ravel() / np.maximum(zhat, ZHAT_FLOOR)
    return GsmNormalizedBand(values=values.reshape(band.shape), zhat=zhat.reshape(band.shape))


def normalize_bands(decomp: SteerableDecomposition) -> Dict[Tuple[int, int], Optional[GsmNormalizedBand]]:
    """Normalized band per (scale, orientation); None marks a degenerate band."""
    normalized = {}
    for scale in range(decomp.scales):
        for orientation in range(decomp.orientations):
            band = decomp.band(scale, orientation)
            try:
                normalized[(scale, orientation)] = divisive_normalize(
                    band, build_neighborhoods(decomp, scale, orientation))
            except DegenerateBandError:
                logger.debug(f"Band ({scale}, {orientation}) is degenerate")
                normalized[(scale, orientation)] = None
    return normalized


def _gamma(values) -> float:
    if values is None or np.size(values) == 0:
        return DEGENERATE_GAMMA
    return fit_ggd(values).gamma


def _correlation(a: np.ndarray, b: np.ndarray, usable: bool) -> float:
    return structural_correlation(a, b) if usable else DEGENERATE_CORRELATION


def global_features(image) -> GlobalFeatures:
    image = image if isinstance(image, GrayImage) else GrayImage(image)
    decomp = decompose(image)
    normalized = normalize_bands(decomp)
    keys = [(scale, orientation) for scale in range(decomp.scales) for orientation in range(decomp.orientations)]

    band_gammas = [_gamma(None if normalized[key] is None else normalized[key].values) for key in keys]

    orientation_gammas = []
    for orientation in range(decomp.orientations):
        parts = [normalized[(scale, orientation)].values.ravel() for scale in range(decomp.scales)
                 if normalized[(scale, orientation)] is not None]
        orientation_gammas.append(_gamma(np.concatenate(parts) if parts else None))

    highpass = decomp.highpass
    scale_correlations = [
        _correlation(highpass, upsample_nearest(np.abs(decomp.band(*key)), highpass.shape),
                     normalized[key] is not None)
        for key in keys]

    magnitudes = [np.abs(decomp.band(0, orientation)) for orientation in range(decomp.orientations)]
    orientation_correlations = [
        _correlation(magnitudes[first], magnitudes[second],
                     normalized[(0, first)] is not None and normalized[(0, second)] is not None)
        for first, second in itertools.combinations(range(decomp.orientations), 2)]

    return GlobalFeatures(np.array(band_gammas + orientation_gammas + scale_correlations + orientation_correlations))
