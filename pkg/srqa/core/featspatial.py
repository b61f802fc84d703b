import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from srqa.core.constants import PATCH_SIZE, PYRAMID_LEVELS, SINGULAR_VALUE_FLOOR, SPATIAL_FEATURE_DIM
from srqa.core.imgcore import GrayImage, build_pyramid, extract_patches

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpatialFeatures:
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (SPATIAL_FEATURE_DIM,):
            raise ValueError(f"spatial features must have {SPATIAL_FEATURE_DIM} values, got {values.shape}")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return SPATIAL_FEATURE_DIM

    def level(self, index: int) -> np.ndarray:
        width = PATCH_SIZE * PATCH_SIZE
        return self.values[index * width:(index + 1) * width]


def patch_covariance(level) -> np.ndarray:
    patches = extract_patches(level, PATCH_SIZE, 1)
    centered = patches - patches.mean(axis=0)
    covariance = centered.T @ centered / patches.shape[0]
    # symmetric bit-for-bit before the eigensolver
    return 0.5 * (covariance + covariance.T)


def singular_spectrum(level) -> np.ndarray:
    """Descending eigenvalues of the patch covariance, divided by the largest."""
    eigenvalues = linalg.eigvalsh(patch_covariance(level))
    spectrum = np.clip(eigenvalues[::-1], 0.0, None)
    if spectrum[0] < SINGULAR_VALUE_FLOOR:
        return np.zeros_like(spectrum)
    return spectrum / spectrum[0]


def spatial_features(image) -> SpatialFeatures:
    image = image if isinstance(image, GrayImage) else GrayImage(image)
    pyramid = build_pyramid(image, PYRAMID_LEVELS)
    return SpatialFeatures(np.concatenate([singular_spectrum(level) for level in pyramid]))
