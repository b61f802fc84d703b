import itertools
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from srqa.core.constants import (LOCAL_FEATURE_DIM, GLOBAL_FEATURE_DIM, SPATIAL_FEATURE_DIM, FEATURE_DIM,
                                 MIN_FEATURE_IMAGE_SIZE, PYRAMID_LEVELS, STEER_SCALES, STEER_ORIENTATIONS,
                                 PATCH_SIZE, FEATURE_DIM_ERROR)
from srqa.core.featglobal import GlobalFeatures, global_features
from srqa.core.featlocal import LocalFeatures, local_features
from srqa.core.featspatial import SpatialFeatures, spatial_features
from srqa.core.imgcore import GrayImage, require_size
from srqa.errors import ParameterError

logger = logging.getLogger(__name__)

LOCAL_STATISTICS = ("gamma_mean", "gamma_low", "sigma_bar_mean", "sigma_bar_high", "Sigma_mean", "Sigma_high")


def _feature_names() -> List[str]:
    names = [f"local_l{level}_{stat}" for level in range(PYRAMID_LEVELS) for stat in LOCAL_STATISTICS]
    bands = [(scale, orientation) for scale in range(STEER_SCALES) for orientation in range(STEER_ORIENTATIONS)]
    names += [f"global_gamma_s{scale}_o{orientation}" for scale, orientation in bands]
    names += [f"global_gamma_o{orientation}" for orientation in range(STEER_ORIENTATIONS)]
    names += [f"global_scale_corr_s{scale}_o{orientation}" for scale, orientation in bands]
    names += [f"global_band_corr_o{first}_o{second}"
              for first, second in itertools.combinations(range(STEER_ORIENTATIONS), 2)]
    names += [f"spatial_l{level}_sv{index}" for level in range(PYRAMID_LEVELS)
              for index in range(PATCH_SIZE * PATCH_SIZE)]
    return names


FEATURE_NAMES = tuple(_feature_names())


@dataclass(frozen=True)
class FeatureVector:
    local: LocalFeatures
    global_: GlobalFeatures
    spatial: SpatialFeatures

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.local.values, self.global_.values, self.spatial.values])

    @staticmethod
    def names():
        return FEATURE_NAMES

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        values = np.asarray(values, dtype=np.float64).ravel()
        if values.size != FEATURE_DIM:
            raise ParameterError(FEATURE_DIM_ERROR.format(expected=FEATURE_DIM, actual=values.size))
        split = LOCAL_FEATURE_DIM + GLOBAL_FEATURE_DIM
        return cls(local=LocalFeatures(values[:LOCAL_FEATURE_DIM]),
                   global_=GlobalFeatures(values[LOCAL_FEATURE_DIM:split]),
                   spatial=SpatialFeatures(values[split:split + SPATIAL_FEATURE_DIM]))

    def to_dict(self):
        return {
            "local": self.local.values.tolist(),
            "global": self.global_.values.tolist(),
            "spatial": self.spatial.values.tolist(),
        }


def extract_features(image) -> FeatureVector:
    image = image if isinstance(image, GrayImage) else GrayImage(image)
    require_size(image, MIN_FEATURE_IMAGE_SIZE)
    return FeatureVector(local=local_features(image), global_=global_features(image),
                         spatial=spatial_features(image))
