import numpy as np
import pytest
from scipy import ndimage
from srqa.core.featlocal import (block_dct, group_coefficients, tile_blocks, block_statistics, local_features,
                                 pool_lowest, pool_highest, LOW_MASK, MID_MASK, HIGH_MASK)
from srqa.core.imgcore import GrayImage
from srqa.errors import ImageError, UndersizedImageError
from tests.conftest import constant_image


def _naive_dct(block):
    n = block.shape[0]
    scale = np.array([np.sqrt(1.0 / n)] + [np.sqrt(2.0 / n)] * (n - 1))
    coeffs = np.zeros((n, n))
    for u in range(n):
        for v in range(n):
            total = 0.0
            for x in range(n):
                for y in range(n):
                    total += (block[x, y] * np.cos(np.pi * (2 * x + 1) * u / (2 * n))
                              * np.cos(np.pi * (2 * y + 1) * v / (2 * n)))
            coeffs[u, v] = scale[u] * scale[v] * total
    return coeffs


def test_dct_matches_basis_projection(rng):
    for _ in range(100):
        block = rng.uniform(size=(7, 7))
        np.testing.assert_allclose(block_dct(block), _naive_dct(block), atol=1e-10)


def test_dct_of_constant_block():
    coeffs = block_dct(np.full((7, 7), 0.4))
    assert coeffs[0, 0] == pytest.approx(7 * 0.4, abs=1e-12)
    coeffs[0, 0] = 0.0
    np.testing.assert_allclose(coeffs, 0.0, atol=1e-12)


def test_dct_preserves_energy(rng):
    block = rng.standard_normal((7, 7))
    assert np.sum(block_dct(block) ** 2) == pytest.approx(np.sum(block ** 2), abs=1e-10)


def test_dct_rejects_wrong_shape():
    with pytest.raises(ImageError):
        block_dct(np.zeros((8, 8)))


def test_coefficient_sets():
    assert (LOW_MASK.sum(), MID_MASK.sum(), HIGH_MASK.sum()) == (9, 18, 21)
    assert LOW_MASK[1, 0] and HIGH_MASK[6, 6]
    assert not (LOW_MASK[0, 0] or MID_MASK[0, 0] or HIGH_MASK[0, 0])
    low, mid, high = group_coefficients(np.arange(49.0).reshape(7, 7))
    assert len(low) + len(mid) + len(high) == 48


def test_tiles_drop_partial_blocks():
    assert tile_blocks(np.zeros((30, 22))).shape == (4 * 3, 7, 7)
    with pytest.raises(UndersizedImageError):
        tile_blocks(np.zeros((6, 30)))


def test_tiles_follow_raster_order():
    values = np.arange(14 * 14, dtype=np.float64).reshape(14, 14)
    tiles = tile_blocks(values)
    np.testing.assert_array_equal(tiles[1], values[:7, 7:])
    np.testing.assert_array_equal(tiles[2], values[7:, :7])


def test_block_statistics_ranges(natural_image):
    stats = block_statistics(natural_image)
    assert len(stats) == (128 // 7) ** 2
    assert np.all((stats.gamma >= 0.1) & (stats.gamma <= 10.0))
    assert np.all(stats.sigma_bar >= 0) and np.all(stats.Sigma >= 0)


def test_pooling_deciles():
    values = np.arange(1.0, 21.0)
    assert pool_lowest(values) == pytest.approx(1.5)
    assert pool_highest(values) == pytest.approx(19.5)
    # fewer than ten values pool the single extreme
    assert pool_lowest(np.array([3.0, 1.0, 2.0])) == 1.0
    assert pool_highest(np.array([3.0, 1.0, 2.0])) == 3.0


def test_local_feature_length(natural_image):
    features = local_features(natural_image)
    assert features.values.shape == (18,)
    assert np.all(np.isfinite(features.values))


def test_constant_image_is_degenerate():
    values = local_features(constant_image(0.6)).values.reshape(3, 6)
    np.testing.assert_array_equal(values[:, :2], 10.0)
    np.testing.assert_array_equal(values[:, 2:], 0.0)


def test_invariant_to_intensity_scaling(natural_image):
    base = local_features(natural_image).values
    scaled = local_features(GrayImage(0.5 * natural_image.data)).values
    np.testing.assert_allclose(scaled, base, atol=1e-6)


def test_deterministic(natural_image):
    np.testing.assert_array_equal(local_features(natural_image).values, local_features(natural_image).values)


def test_blur_lowers_fine_level_gamma(natural_image):
    blurred = GrayImage(np.clip(ndimage.gaussian_filter(natural_image.data, 2.0, mode="reflect"), 0.0, 1.0))
    sharp_gamma = local_features(natural_image).values[0]
    blurred_gamma = local_features(blurred).values[0]
    assert blurred_gamma < 0.75 * sharp_gamma
