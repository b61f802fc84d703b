import logging
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, special, stats as scipy_stats

from srqa.core.constants import (GGD_MIN_SAMPLES, GGD_GAMMA_MIN, GGD_GAMMA_MAX, GGD_TOLERANCE, VARIANCE_FLOOR,
                                 CORRELATION_WINDOW_SIZE, CORRELATION_WINDOW_SIGMA, CORRELATION_C0_FACTOR,
                                 CORRELATION_C0_FLOOR, PERCEPTUAL_TRIM_FRACTION, PERCEPTUAL_MIN_SCORES,
                                 TOO_FEW_SAMPLES_ERROR, LENGTH_MISMATCH_ERROR, CONSTANT_INPUT_ERROR,
                                 ZERO_VARIANCE_ERROR, SHAPE_MISMATCH_ERROR, UNDERSIZED_IMAGE_ERROR)
from srqa.core.imgcore import as_array, BOUNDARY_MODE
from srqa.errors import StatsError, UndersizedImageError

logger = logging.getLogger(__name__)

# bisection halvings needed to shrink [0.1, 10] below the tolerance
_BISECTION_STEPS = int(np.ceil(np.log2((GGD_GAMMA_MAX - GGD_GAMMA_MIN) / GGD_TOLERANCE)))


@dataclass(frozen=True)
class GgdParams:
    mu: float
    gamma: float
    beta: float
    degenerate: bool = False


@dataclass(frozen=True)
class CorrelationWindow:
    size: int = CORRELATION_WINDOW_SIZE
    sigma: float = CORRELATION_WINDOW_SIGMA
    c0_factor: float = CORRELATION_C0_FACTOR

    @property
    def taps(self) -> np.ndarray:
        offsets = np.arange(self.size) - self.size // 2
        taps = np.exp(-offsets ** 2 / (2.0 * self.sigma ** 2))
        return taps / taps.sum()

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.taps, self.taps)


def ggd_moment_ratio(gamma):
    """r(gamma) = Gamma(1/g) Gamma(3/g) / Gamma(2/g)^2, strictly decreasing in gamma."""
    gamma = np.asarray(gamma, dtype=np.float64)
    return np.exp(special.gammaln(1.0 / gamma) + special.gammaln(3.0 / gamma) - 2.0 * special.gammaln(2.0 / gamma))


def ggd_shape_from_ratio(ratio):
    """Vectorised bisection of r(gamma) = ratio on [0.1, 10]; out-of-range ratios clamp to the ends."""
    ratio = np.asarray(ratio, dtype=np.float64)
    low = np.full(ratio.shape, GGD_GAMMA_MIN)
    high = np.full(ratio.shape, GGD_GAMMA_MAX)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (low + high)
        # r decreasing: r(mid) > ratio means the root lies above mid
        above = ggd_moment_ratio(mid) > ratio
        low = np.where(above, mid, low)
        high = np.where(above, high, mid)
    shape = 0.5 * (low + high)
    shape = np.where(ratio >= ggd_moment_ratio(GGD_GAMMA_MIN), GGD_GAMMA_MIN, shape)
    return np.where(ratio <= ggd_moment_ratio(GGD_GAMMA_MAX), GGD_GAMMA_MAX, shape)


def ggd_shapes(rows: np.ndarray) -> np.ndarray:
    """GGD shape of every row of a 2-D sample matrix; zero-variance rows get the upper clamp."""
    rows = np.asarray(rows, dtype=np.float64)
    centered = rows - rows.mean(axis=1, keepdims=True)
    m1 = np.abs(centered).mean(axis=1)
    m2 = (centered ** 2).mean(axis=1)
    degenerate = m2 <= VARIANCE_FLOOR
    ratio = np.where(degenerate, 1.0, m2 / np.where(degenerate, 1.0, m1 ** 2))
    return np.where(degenerate, GGD_GAMMA_MAX, ggd_shape_from_ratio(ratio))


def fit_ggd(samples) -> GgdParams:
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < GGD_MIN_SAMPLES:
        raise StatsError(TOO_FEW_SAMPLES_ERROR.format(minimum=GGD_MIN_SAMPLES, count=x.size))
    mu = float(x.mean())
    centered = x - mu
    m1 = float(np.abs(centered).mean())
    m2 = float((centered ** 2).mean())
    if m2 <= VARIANCE_FLOOR:
        logger.debug(f"Degenerate GGD fit over {x.size} samples")
        return GgdParams(mu=mu, gamma=GGD_GAMMA_MAX, beta=float(np.finfo(np.float64).eps), degenerate=True)
    gamma = float(ggd_shape_from_ratio(m2 / m1 ** 2))
    beta = float(np.sqrt(m2 * np.exp(special.gammaln(1.0 / gamma) - special.gammaln(3.0 / gamma))))
    return GgdParams(mu=mu, gamma=gamma, beta=beta)


def _local_mean(values: np.ndarray, taps: np.ndarray) -> np.ndarray:
    smoothed = ndimage.correlate1d(values, taps, axis=0, mode=BOUNDARY_MODE)
    return ndimage.correlate1d(smoothed, taps, axis=1, mode=BOUNDARY_MODE)


def structural_correlation_map(a, b, window: CorrelationWindow = None) -> np.ndarray:
    window = window or CorrelationWindow()
    a, b = as_array(a), as_array(b)
    if a.shape != b.shape:
        raise StatsError(SHAPE_MISMATCH_ERROR.format(left=a.shape, right=b.shape))
    if min(a.shape) < window.size:
        raise UndersizedImageError(UNDERSIZED_IMAGE_ERROR.format(
            height=a.shape[0], width=a.shape[1], min_height=window.size, min_width=window.size))
    dynamic_range = max(a.max(), b.max()) - min(a.min(), b.min())
    c0 = max(window.c0_factor * dynamic_range ** 2, CORRELATION_C0_FLOOR)
    taps = window.taps
    mu_a, mu_b = _local_mean(a, taps), _local_mean(b, taps)
    var_a = _local_mean(a * a, taps) - mu_a * mu_a
    var_b = _local_mean(b * b, taps) - mu_b * mu_b
    cov_ab = _local_mean(a * b, taps) - mu_a * mu_b
    return (2.0 * cov_ab + c0) / (var_a + var_b + c0)


def structural_correlation(a, b, window: CorrelationWindow = None) -> float:
    rho = structural_correlation_map(a, b, window)
    return float(np.clip(rho.mean(), -1.0, 1.0))


def _paired(x, y):
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise StatsError(LENGTH_MISMATCH_ERROR.format(left=x.size, right=y.size))
    return x, y


def spearman(x, y) -> float:
    x, y = _paired(x, y)
    if x.size < 2:
        raise StatsError(TOO_FEW_SAMPLES_ERROR.format(minimum=2, count=x.size))
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise StatsError(CONSTANT_INPUT_ERROR)
    rank_x = scipy_stats.rankdata(x, method="average")
    rank_y = scipy_stats.rankdata(y, method="average")
    rho = np.corrcoef(rank_x, rank_y)[0, 1]
    return float(np.clip(rho, -1.0, 1.0))


def rmse(pred, truth) -> float:
    pred, truth = _paired(pred, truth)
    if pred.size < 1:
        raise StatsError(TOO_FEW_SAMPLES_ERROR.format(minimum=1, count=0))
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


def aggregate_perceptual(scores) -> float:
    """Mean after trimming 10% of the ratings from each tail (50 ratings keep the middle 40)."""
    values = np.sort(np.asarray(scores, dtype=np.float64).ravel())
    if values.size < PERCEPTUAL_MIN_SCORES:
        raise StatsError(TOO_FEW_SAMPLES_ERROR.format(minimum=PERCEPTUAL_MIN_SCORES, count=values.size))
    trim = int(np.floor(PERCEPTUAL_TRIM_FRACTION * values.size + 0.5))
    return float(values[trim:values.size - trim].mean())


def kurtosis(samples) -> float:
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < 4:
        raise StatsError(TOO_FEW_SAMPLES_ERROR.format(minimum=4, count=x.size))
    if np.var(x) <= VARIANCE_FLOOR:
        raise StatsError(ZERO_VARIANCE_ERROR)
    return float(scipy_stats.kurtosis(x, fisher=False, bias=True))
