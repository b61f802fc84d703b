import numpy as np
import pytest
from srqa.core.stats import (ggd_moment_ratio, ggd_shape_from_ratio, ggd_shapes, fit_ggd, structural_correlation,
                             CorrelationWindow, spearman, rmse, aggregate_perceptual, kurtosis)
from srqa.errors import StatsError, UndersizedImageError

SAMPLE_COUNT = 100_000


def sample_ggd(gamma, count, rng):
    # |x|^gamma ~ Gamma(1/gamma, 1) for a unit-scale GGD
    magnitude = rng.gamma(1.0 / gamma, 1.0, count) ** (1.0 / gamma)
    return magnitude * rng.choice([-1.0, 1.0], count)


@pytest.mark.parametrize("gamma", [0.75, 1.0, 2.0])
def test_fit_recovers_ggd_shape(gamma, rng):
    params = fit_ggd(sample_ggd(gamma, SAMPLE_COUNT, rng))
    assert params.gamma == pytest.approx(gamma, abs=0.1)
    assert not params.degenerate


def test_fit_gaussian_and_laplacian(rng):
    assert fit_ggd(rng.standard_normal(SAMPLE_COUNT)).gamma == pytest.approx(2.0, abs=0.1)
    assert fit_ggd(rng.laplace(size=SAMPLE_COUNT)).gamma == pytest.approx(1.0, abs=0.1)


def test_fit_uniform_is_light_tailed(rng):
    assert fit_ggd(rng.uniform(-1, 1, SAMPLE_COUNT)).gamma > 4


def test_fit_is_location_scale_equivariant(rng):
    x = rng.laplace(size=5000)
    base = fit_ggd(x)
    moved = fit_ggd(3.5 * x + 2.0)
    assert moved.gamma == pytest.approx(base.gamma, abs=1e-3)
    assert moved.mu == pytest.approx(3.5 * base.mu + 2.0, rel=1e-9)
    assert moved.beta == pytest.approx(3.5 * base.beta, rel=1e-6)


def test_fit_constant_is_degenerate():
    params = fit_ggd(np.full(100, 0.3))
    assert params.degenerate
    assert params.gamma == 10.0


def test_fit_needs_samples():
    with pytest.raises(StatsError):
        fit_ggd(np.arange(29.0))


def test_moment_ratio_is_decreasing():
    gammas = np.linspace(0.1, 10.0, 500)
    assert np.all(np.diff(ggd_moment_ratio(gammas)) < 0)


def test_shape_from_ratio_inverts_ratio():
    gammas = np.array([0.3, 0.8, 1.5, 2.0, 4.0, 7.5])
    np.testing.assert_allclose(ggd_shape_from_ratio(ggd_moment_ratio(gammas)), gammas, atol=1e-4)


def test_shape_from_ratio_clamps():
    assert ggd_shape_from_ratio(1e9) == pytest.approx(0.1)
    assert ggd_shape_from_ratio(1.0) == pytest.approx(10.0)


def test_row_shapes_match_single_fits(rng):
    rows = rng.laplace(size=(4, 48))
    rows[2] = 0.25
    shapes = ggd_shapes(rows)
    assert shapes[2] == 10.0
    for index in (0, 1, 3):
        assert shapes[index] == pytest.approx(fit_ggd(rows[index]).gamma, abs=1e-4)


def _brute_force_correlation(a, b, window):
    half = window.size // 2
    weights = window.weights
    padded_a = np.pad(a, half, mode="symmetric")
    padded_b = np.pad(b, half, mode="symmetric")
    c0 = window.c0_factor * (max(a.max(), b.max()) - min(a.min(), b.min())) ** 2
    values = np.empty(a.shape)
    for row in range(a.shape[0]):
        for col in range(a.shape[1]):
            wa = padded_a[row:row + window.size, col:col + window.size]
            wb = padded_b[row:row + window.size, col:col + window.size]
            mu_a, mu_b = (weights * wa).sum(), (weights * wb).sum()
            var_a = (weights * wa * wa).sum() - mu_a ** 2
            var_b = (weights * wb * wb).sum() - mu_b ** 2
            cov = (weights * wa * wb).sum() - mu_a * mu_b
            values[row, col] = (2 * cov + c0) / (var_a + var_b + c0)
    return float(np.clip(values.mean(), -1, 1))


def test_correlation_matches_windowed_moments(rng):
    window = CorrelationWindow()
    a = rng.uniform(size=(32, 32))
    b = 0.5 * a + 0.5 * rng.uniform(size=(32, 32))
    assert structural_correlation(a, b, window) == pytest.approx(_brute_force_correlation(a, b, window), abs=1e-10)


def test_correlation_with_self_and_negation(rng):
    band = rng.standard_normal((40, 40))
    assert structural_correlation(band, band) == pytest.approx(1.0, abs=1e-9)
    assert structural_correlation(band, -band) < 0


def test_correlation_window_minimum(rng):
    with pytest.raises(UndersizedImageError):
        structural_correlation(rng.uniform(size=(14, 40)), rng.uniform(size=(14, 40)))
    with pytest.raises(StatsError):
        structural_correlation(rng.uniform(size=(20, 20)), rng.uniform(size=(20, 21)))


def test_spearman_known_values():
    x = np.array([0.3, 1.2, 5.0, 2.2, 9.1])
    assert spearman(x, x) == pytest.approx(1.0)
    assert spearman(x, -x) == pytest.approx(-1.0)
    assert spearman([1, 2, 3, 4, 5], [2, 1, 4, 3, 5]) == pytest.approx(0.8, abs=1e-12)


def test_spearman_matches_closed_form(rng):
    for _ in range(200):
        n = int(rng.integers(3, 9))
        x = rng.permutation(n) + 1
        y = rng.permutation(n) + 1
        if np.ptp(x) == 0 or np.ptp(y) == 0:
            continue
        expected = 1 - 6 * np.sum((x - y) ** 2) / (n * (n * n - 1))
        assert spearman(x, y) == pytest.approx(expected, abs=1e-12)


def test_spearman_is_rank_invariant(rng):
    x, y = rng.standard_normal(30), rng.standard_normal(30)
    assert spearman(np.exp(x), y ** 3) == spearman(x, y)


def test_spearman_errors():
    with pytest.raises(StatsError):
        spearman([1.0], [2.0])
    with pytest.raises(StatsError):
        spearman([1, 2, 3], [1, 2])
    with pytest.raises(StatsError):
        spearman([1, 1, 1], [1, 2, 3])


def test_rmse_known_values():
    assert rmse([1, 2, 3], [1, 2, 3]) == 0.0
    assert rmse([2, 3, 4], [1, 2, 3]) == pytest.approx(1.0)
    assert rmse([0, 3], [0, 0]) == pytest.approx(np.sqrt(4.5))
    with pytest.raises(StatsError):
        rmse([], [])


def test_aggregate_perceptual_known_values(rng):
    assert aggregate_perceptual([7.0] * 50) == 7.0
    assert aggregate_perceptual(np.arange(1, 51)) == pytest.approx(25.5)
    scores = 5.0 + rng.uniform(-0.5, 0.5, 50)
    scores[17] = 1e6
    assert 4.0 <= aggregate_perceptual(scores) <= 6.0


def test_aggregate_perceptual_is_order_free(rng):
    scores = rng.uniform(0, 10, 50)
    assert aggregate_perceptual(scores) == aggregate_perceptual(rng.permutation(scores))


def test_aggregate_perceptual_needs_ten():
    with pytest.raises(StatsError):
        aggregate_perceptual([5.0] * 9)


def test_kurtosis_known_values(rng):
    assert kurtosis(rng.standard_normal(1_000_000)) == pytest.approx(3.0, abs=0.05)
    assert kurtosis(rng.laplace(size=1_000_000)) == pytest.approx(6.0, abs=0.2)
    assert kurtosis([-1.0, 1.0] * 50) == pytest.approx(1.0)


def test_kurtosis_errors():
    with pytest.raises(StatsError):
        kurtosis([1.0, 2.0, 3.0])
    with pytest.raises(StatsError):
        kurtosis([2.0] * 10)
