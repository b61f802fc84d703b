"""Frequency-domain steerable pyramid.

Radial split: raised-cosine high/low pairs hi = sin(pi t / 2), lo = cos(pi t / 2)
over one octave of log2 radius, applied recursively. Angular split: K filters
proportional to cos^(K-1)(theta - pi k / K); the analytic configuration keeps a
single half-plane at twice the gain, so its real part equals the real
configuration band. Orientation theta is the angle of the frequency vector
measured from the column axis toward increasing row index.
"""
import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import fft

from srqa.core.constants import (STEER_SCALES, STEER_ORIENTATIONS, STEER_MIN_SIZE, BAND_INDEX_ERROR,
                                 DECOMPOSITION_SHAPE_ERROR, UNDERSIZED_IMAGE_ERROR)
from srqa.core.imgcore import as_array
from srqa.errors import ParameterError, UndersizedImageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SteerableDecomposition:
    highpass: np.ndarray
    bands: Tuple[Tuple[np.ndarray, ...], ...]
    lowpass: np.ndarray
    original_shape: Tuple[int, int]
    analytic: bool = True

    @property
    def scales(self) -> int:
        return len(self.bands)

    @property
    def orientations(self) -> int:
        return len(self.bands[0]) if self.bands else 0

    def band(self, scale: int, orientation: int) -> np.ndarray:
        if not (0 <= scale < self.scales and 0 <= orientation < self.orientations):
            raise ParameterError(BAND_INDEX_ERROR.format(scale=scale, orientation=orientation))
        return self.bands[scale][orientation]

    def map_bands(self, transform) -> "SteerableDecomposition":
        """Copy with ``transform`` applied to highpass, every band and lowpass."""
        return SteerableDecomposition(
            highpass=transform(self.highpass),
            bands=tuple(tuple(transform(band) for band in level) for level in self.bands),
            lowpass=transform(self.lowpass),
            original_shape=self.original_shape,
            analytic=self.analytic)


def _center(shape) -> np.ndarray:
    return np.ceil((np.asarray(shape) + 0.5) / 2).astype(int)


def _crop_window(shape) -> Tuple[slice, slice]:
    dims = np.asarray(shape)
    low_dims = np.ceil((dims - 0.5) / 2).astype(int)
    start = _center(dims) - _center(low_dims)
    end = start + low_dims
    return slice(start[0], end[0]), slice(start[1], end[1])


def _frequency_grid(shape) -> Tuple[np.ndarray, np.ndarray]:
    rows, cols = shape
    col_ramp, row_ramp = np.meshgrid(np.linspace(-1, 1, cols + 1)[:-1], np.linspace(-1, 1, rows + 1)[:-1])
    angle = np.arctan2(row_ramp, col_ramp)
    radius = np.sqrt(col_ramp ** 2 + row_ramp ** 2)
    row, col = _center(shape) - 1
    # DC borrows its neighbour so log2 stays finite
    radius[row, col] = radius[row, col - 1]
    return np.log2(radius), angle


def _radial_pair(log_rad: np.ndarray, depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """(high, low) masks whose transition spans log2 radius [-1 - depth, -depth]."""
    t = np.clip(log_rad + 1.0 + depth, 0.0, 1.0)
    return np.sin(0.5 * np.pi * t), np.cos(0.5 * np.pi * t)


def _angle_mask(angle: np.ndarray, orientation: int, orientations: int, analytic: bool) -> np.ndarray:
    order = orientations - 1
    const = (2 ** (2 * order)) * math.factorial(order) ** 2 / (orientations * math.factorial(2 * order))
    alfa = np.mod(np.pi + angle - np.pi * orientation / orientations, 2 * np.pi) - np.pi
    if analytic:
        return 2.0 * np.sqrt(const) * np.cos(alfa) ** order * (np.abs(alfa) < np.pi / 2)
    return np.sqrt(const) * np.cos(alfa) ** order


def _spectrum(values: np.ndarray) -> np.ndarray:
    return fft.fftshift(fft.fft2(values))


def _spatial(spectrum: np.ndarray) -> np.ndarray:
    return fft.ifft2(fft.ifftshift(spectrum))


def _validate(values: np.ndarray, scales: int, orientations: int) -> None:
    if values.ndim != 2:
        raise ParameterError(DECOMPOSITION_SHAPE_ERROR.format(detail=f"input shape {values.shape}"))
    if scales < 1 or orientations < 2:
        raise ParameterError(DECOMPOSITION_SHAPE_ERROR.format(
            detail=f"{scales} scales and {orientations} orientations"))
    if min(values.shape) < STEER_MIN_SIZE:
        raise UndersizedImageError(UNDERSIZED_IMAGE_ERROR.format(
            height=values.shape[0], width=values.shape[1], min_height=STEER_MIN_SIZE, min_width=STEER_MIN_SIZE))


def decompose(image, scales: int = STEER_SCALES, orientations: int = STEER_ORIENTATIONS,
              analytic: bool = True) -> SteerableDecomposition:
    values = as_array(image)
    _validate(values, scales, orientations)
    padded = np.pad(values, ((0, values.shape[0] % 2), (0, values.shape[1] % 2)), mode="symmetric")

    log_rad, angle = _frequency_grid(padded.shape)
    spectrum = _spectrum(padded)
    hi0_mask, lo0_mask = _radial_pair(log_rad, 0)
    highpass = np.real(_spatial(spectrum * hi0_mask))
    low_spectrum = spectrum * lo0_mask

    phase = (-1j) ** (orientations - 1)
    bands = []
    for level in range(scales):
        band_mask, _ = _radial_pair(log_rad, level + 1)
        level_bands = []
        for orientation in range(orientations):
            band = _spatial(phase * low_spectrum * _angle_mask(angle, orientation, orientations, analytic) * band_mask)
            level_bands.append(band if analytic else np.real(band))
        bands.append(tuple(level_bands))

        window = _crop_window(low_spectrum.shape)
        log_rad, angle = log_rad[window], angle[window]
        _, low_mask = _radial_pair(log_rad, level + 1)
        low_spectrum = low_spectrum[window] * low_mask

    lowpass = np.real(_spatial(low_spectrum))
    return SteerableDecomposition(highpass=highpass, bands=tuple(bands), lowpass=lowpass,
                                  original_shape=tuple(values.shape), analytic=analytic)


def _expected_shapes(padded_shape, scales: int):
    shape = tuple(padded_shape)
    band_shapes = []
    for _ in range(scales):
        band_shapes.append(shape)
        window = _crop_window(shape)
        shape = (window[0].stop - window[0].start, window[1].stop - window[1].start)
    return band_shapes, shape


def _check_shapes(decomp: SteerableDecomposition) -> None:
    if decomp.scales < 1 or any(len(level) != decomp.orientations for level in decomp.bands):
        raise ParameterError(DECOMPOSITION_SHAPE_ERROR.format(detail="ragged band set"))
    band_shapes, low_shape = _expected_shapes(np.shape(decomp.highpass), decomp.scales)
    for level, expected in enumerate(band_shapes):
        for band in decomp.bands[level]:
            if np.shape(band) != expected:
                raise ParameterError(DECOMPOSITION_SHAPE_ERROR.format(
                    detail=f"band at scale {level} has shape {np.shape(band)}, expected {expected}"))
    if np.shape(decomp.lowpass) != low_shape:
        raise ParameterError(DECOMPOSITION_SHAPE_ERROR.format(
            detail=f"lowpass has shape {np.shape(decomp.lowpass)}, expected {low_shape}"))


def _synthesize_level(decomp: SteerableDecomposition, level: int, log_rad: np.ndarray,
                      angle: np.ndarray) -> np.ndarray:
    window = _crop_window(log_rad.shape)
    inner_rad, inner_angle = log_rad[window], angle[window]
    if level + 1 < decomp.scales:
        inner = _synthesize_level(decomp, level + 1, inner_rad, inner_angle)
    else:
        inner = _spectrum(decomp.lowpass)
    _, low_mask = _radial_pair(inner_rad, level + 1)
    result = np.zeros(log_rad.shape, dtype=np.complex128)
    result[window] = inner * low_mask

    band_mask, _ = _radial_pair(log_rad, level + 1)
    phase = 1j ** (decomp.orientations - 1)
    for orientation, band in enumerate(decomp.bands[level]):
        mask = _angle_mask(angle, orientation, decomp.orientations, analytic=False)
        result += phase * _spectrum(np.real(band)) * mask * band_mask
    return result


def reconstruct(decomp: SteerableDecomposition) -> np.ndarray:
    """Synthesis from the real parts of the bands; exact inverse of the real configuration.

    Returns the unclipped image array (wrap in GrayImage after clipping if needed),
    since single-band reconstructions are not confined to [0, 1].
    """
    _check_shapes(decomp)
    log_rad, angle = _frequency_grid(np.shape(decomp.highpass))
    hi0_mask, lo0_mask = _radial_pair(log_rad, 0)
    low_spectrum = _synthesize_level(decomp, 0, log_rad, angle)
    spectrum = _spectrum(decomp.highpass) * hi0_mask + low_spectrum * lo0_mask
    values = np.real(_spatial(spectrum))
    rows, cols = decomp.original_shape
    return values[:rows, :cols]


def frequency_response(shape, scales: int = STEER_SCALES, orientations: int = STEER_ORIENTATIONS,
                       analytic: bool = False) -> Tuple[np.ndarray, ...]:
    """Full-resolution masks of every filter: highpass, each band (scale-major), lowpass."""
    log_rad, angle = _frequency_grid(shape)
    hi0_mask, carried = _radial_pair(log_rad, 0)
    responses = [hi0_mask]
    for level in range(scales):
        band_mask, low_mask = _radial_pair(log_rad, level + 1)
        for orientation in range(orientations):
            responses.append(carried * band_mask * _angle_mask(angle, orientation, orientations, analytic))
        carried = carried * low_mask
    responses.append(carried)
    return tuple(responses)
