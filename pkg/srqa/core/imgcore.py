"""Image ingestion, luminance conversion, Gaussian pyramids and the LR-image
formation operator I_l(u, v) = sum_{x,y} k(x - su, y - sv) I_h(x, y)."""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from PIL import Image, UnidentifiedImageError
from scipy import ndimage

from srqa.core.constants import (LUMA_WEIGHTS, SUPPORTED_IMAGE_FORMATS, PYRAMID_LEVELS, PYRAMID_BLUR_SIGMA,
                                 PYRAMID_BLUR_SIZE, PYRAMID_MIN_BASE, UNREADABLE_FILE_ERROR,
                                 UNSUPPORTED_FORMAT_ERROR, ZERO_DIMENSION_ERROR, IMAGE_RANGE_ERROR,
                                 IMAGE_SHAPE_ERROR, UNDERSIZED_IMAGE_ERROR, SIGMA_ERROR, KERNEL_SIZE_ERROR,
                                 SCALE_ERROR, LEVELS_ERROR, PATCH_ARGS_ERROR)
from srqa.errors import ImageError, UndersizedImageError, ParameterError

logger = logging.getLogger(__name__)

# mirror extension, edge sample repeated (d c b a | a b c d)
BOUNDARY_MODE = "reflect"


@dataclass(frozen=True, eq=False)
class GrayImage:
    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ImageError(IMAGE_SHAPE_ERROR.format(shape=data.shape))
        if data.size and (not np.all(np.isfinite(data)) or data.min() < 0.0 or data.max() > 1.0):
            raise ImageError(IMAGE_RANGE_ERROR)
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape


@dataclass(frozen=True)
class GaussianKernel:
    size: int
    sigma: float
    weights: np.ndarray


@dataclass(frozen=True)
class Pyramid:
    levels: Tuple[GrayImage, ...]

    def __len__(self):
        return len(self.levels)

    def __getitem__(self, index) -> GrayImage:
        return self.levels[index]


def as_array(image) -> np.ndarray:
    if isinstance(image, GrayImage):
        return image.data
    return np.asarray(image, dtype=np.float64)


def to_luma(r, g, b):
    """Weighted luminance; equal channels map to themselves exactly."""
    wr, wg, _ = LUMA_WEIGHTS
    return b + wr * (r - b) + wg * (g - b)


def _from_pixels(pixels: np.ndarray) -> GrayImage:
    values = pixels.astype(np.float64) / 255.0
    if values.ndim == 3:
        values = to_luma(values[..., 0], values[..., 1], values[..., 2])
    return GrayImage(np.clip(values, 0.0, 1.0))


def _read_pixels(path) -> np.ndarray:
    try:
        with Image.open(path) as handle:
            image_format = handle.format
            if image_format not in SUPPORTED_IMAGE_FORMATS:
                raise ImageError(UNSUPPORTED_FORMAT_ERROR.format(format=image_format, path=path))
            handle.load()
            if handle.width == 0 or handle.height == 0:
                raise ImageError(ZERO_DIMENSION_ERROR.format(path=path))
            if handle.mode == "L":
                return np.asarray(handle)
            return np.asarray(handle.convert("RGB"))
    except ImageError:
        raise
    except (OSError, UnidentifiedImageError, SyntaxError, ValueError) as error:
        raise ImageError(UNREADABLE_FILE_ERROR.format(path=path)) from error


def load_image(path) -> GrayImage:
    return _from_pixels(_read_pixels(path))


def load_color(path) -> np.ndarray:
    """Returns float RGB in [0,1]; gray files stay 2-D."""
    return _read_pixels(path).astype(np.float64) / 255.0


def save_image(image, path) -> None:
    values = as_array(image)
    pixels = np.clip(np.round(values * 255.0), 0, 255).astype(np.uint8)
    Image.fromarray(pixels).save(path, format="PNG")


def require_size(image, min_height: int, min_width: int = None) -> None:
    min_width = min_height if min_width is None else min_width
    height, width = as_array(image).shape
    if height < min_height or width < min_width:
        raise UndersizedImageError(UNDERSIZED_IMAGE_ERROR.format(
            height=height, width=width, min_height=min_height, min_width=min_width))


def gaussian_kernel(sigma: float, size: int) -> GaussianKernel:
    if not sigma > 0:
        raise ParameterError(SIGMA_ERROR.format(sigma=sigma))
    if int(size) != size or size < 3 or size % 2 == 0:
        raise ParameterError(KERNEL_SIZE_ERROR.format(size=size))
    size = int(size)
    offsets = np.arange(size) - size // 2
    dx, dy = np.meshgrid(offsets, offsets)
    weights = np.exp(-(dx ** 2 + dy ** 2) / (2.0 * sigma ** 2))
    weights /= weights.sum()
    weights.setflags(write=False)
    return GaussianKernel(size=size, sigma=float(sigma), weights=weights)


def kernel_size_for(sigma: float) -> int:
    return 2 * math.ceil(3 * sigma) + 1


def _separable_taps(sigma: float, size: int) -> np.ndarray:
    offsets = np.arange(size) - size // 2
    taps = np.exp(-offsets ** 2 / (2.0 * sigma ** 2))
    return taps / taps.sum()


def gaussian_blur(values: np.ndarray, sigma: float, size: int) -> np.ndarray:
    # the normalized 2-D kernel is the outer product of normalized 1-D taps
    taps = _separable_taps(sigma, size)
    blurred = ndimage.correlate1d(values, taps, axis=0, mode=BOUNDARY_MODE)
    return ndimage.correlate1d(blurred, taps, axis=1, mode=BOUNDARY_MODE)


def center_crop(values: np.ndarray, multiple: int) -> np.ndarray:
    height, width = values.shape
    new_height, new_width = height - height % multiple, width - width % multiple
    top, left = (height - new_height) // 2, (width - new_width) // 2
    return values[top:top + new_height, left:left + new_width]


def downsample(image, s: int, sigma: float) -> GrayImage:
    if int(s) != s or s < 2:
        raise ParameterError(SCALE_ERROR.format(s=s))
    if not sigma > 0:
        raise ParameterError(SIGMA_ERROR.format(sigma=sigma))
    s = int(s)
    values = center_crop(as_array(image), s)
    if values.size == 0:
        raise UndersizedImageError(UNDERSIZED_IMAGE_ERROR.format(
            height=as_array(image).shape[0], width=as_array(image).shape[1], min_height=s, min_width=s))
    blurred = gaussian_blur(values, sigma, kernel_size_for(sigma))
    # sample centre of each s x s cell
    offset = (s - 1) // 2
    return GrayImage(np.clip(blurred[offset::s, offset::s], 0.0, 1.0))


def build_pyramid(image, levels: int = PYRAMID_LEVELS) -> Pyramid:
    if levels < 1:
        raise ParameterError(LEVELS_ERROR.format(levels=levels))
    base = image if isinstance(image, GrayImage) else GrayImage(image)
    minimum = 2 ** (levels - 1) * PYRAMID_MIN_BASE
    require_size(base, minimum)
    current = base
    result = [base]
    for _ in range(levels - 1):
        blurred = gaussian_blur(current.data, PYRAMID_BLUR_SIGMA, PYRAMID_BLUR_SIZE)
        current = GrayImage(np.clip(blurred[::2, ::2], 0.0, 1.0))
        result.append(current)
    return Pyramid(levels=tuple(result))


def extract_patches(image, size: int = 5, stride: int = 1) -> np.ndarray:
    if size < 1 or stride < 1:
        raise ParameterError(PATCH_ARGS_ERROR.format(size=size, stride=stride))
    values = as_array(image)
    require_size(values, size)
    windows = np.lib.stride_tricks.sliding_window_view(values, (size, size))[::stride, ::stride]
    return windows.reshape(-1, size * size).copy()
