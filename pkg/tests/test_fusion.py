import numpy as np
import pytest
from scipy import ndimage
from srqa.core.features import extract_features
from srqa.core.fusion import grid_cells, feather_weights, grid_fuse
from srqa.core.imgcore import GrayImage
from srqa.core.regress import ForestParams, train_two_stage
from srqa.core.synth import dead_leaves
from srqa.errors import FusionError, ParameterError


def mean_scorer(cell):
    return float(cell.data.mean())


def test_identical_candidates_reproduce_input(natural_image):
    result = grid_fuse([natural_image, natural_image.data.copy()], grid=2, overlap=8, scorer=mean_scorer)
    np.testing.assert_allclose(result.image, natural_image.data, atol=1e-12)
    np.testing.assert_array_equal(result.region_map.winners, 0)


def test_single_cell_returns_best_candidate(rng):
    candidates = [rng.uniform(0.0, 0.3, (96, 96)), rng.uniform(0.5, 1.0, (96, 96)), rng.uniform(0.2, 0.6, (96, 96))]
    result = grid_fuse(candidates, grid=1, scorer=mean_scorer)
    np.testing.assert_array_equal(result.image, candidates[1])
    assert result.region_map.winners.tolist() == [[1]]
    assert result.region_map.candidate_scores.shape == (1, 1, 3)


def test_cells_pick_their_own_winner():
    dark, bright = np.full((128, 128), 0.2), np.full((128, 128), 0.2)
    dark[:64, :64] = 0.9
    bright[64:, 64:] = 0.9
    result = grid_fuse([dark, bright], grid=2, overlap=0, scorer=mean_scorer)
    assert result.region_map.winners.tolist() == [[0, 0], [0, 1]]
    assert result.image[10, 10] == 0.9 and result.image[100, 100] == 0.9


def test_output_is_convex_combination(rng):
    candidates = [rng.uniform(size=(150, 150)) for _ in range(3)]
    result = grid_fuse(candidates, grid=2, overlap=16, scorer=lambda cell: float(cell.data.std()))
    stacked = np.stack(candidates)
    assert np.all(result.image >= stacked.min(axis=0) - 1e-12)
    assert np.all(result.image <= stacked.max(axis=0) + 1e-12)


def test_ties_go_to_first_candidate(rng):
    candidates = [rng.uniform(size=(128, 128)) for _ in range(3)]
    result = grid_fuse(candidates, grid=2, scorer=lambda cell: 1.0)
    np.testing.assert_array_equal(result.region_map.winners, 0)
    np.testing.assert_allclose(result.image, candidates[0], atol=1e-12)


def test_color_candidates(rng):
    candidates = [rng.uniform(size=(128, 128, 3)) for _ in range(2)]
    result = grid_fuse(candidates, grid=1, scorer=mean_scorer, threads=2)
    assert result.image.shape == (128, 128, 3)


def test_feather_weights_sum_to_one():
    shape, overlap = (200, 200), 12
    total = np.zeros(shape)
    for cell in grid_cells(shape, 3, overlap):
        total[cell.region] += feather_weights(cell, shape, overlap)
    np.testing.assert_allclose(total, 1.0, atol=1e-12)


def test_region_map_to_dict(natural_image):
    result = grid_fuse([natural_image, natural_image], grid=2, overlap=4, scorer=mean_scorer)
    document = result.region_map.to_dict()
    assert document["grid"] == 2
    assert len(document["candidate_scores"][0][0]) == 2


def test_fusion_errors(rng):
    image = rng.uniform(size=(128, 128))
    with pytest.raises(FusionError):
        grid_fuse([image], scorer=mean_scorer)
    with pytest.raises(FusionError):
        grid_fuse([image, rng.uniform(size=(128, 120))], grid=1, scorer=mean_scorer)
    with pytest.raises(FusionError):
        grid_fuse([image, image], grid=3, scorer=mean_scorer)
    with pytest.raises(FusionError):
        grid_fuse([image, image], grid=2, overlap=40, scorer=mean_scorer)
    with pytest.raises(ParameterError):
        grid_fuse([image, image], grid=1)


def _blur(image, sigma=3.0):
    return GrayImage(np.clip(ndimage.gaussian_filter(image.data, sigma, mode="reflect"), 0.0, 1.0))


@pytest.fixture(scope="module")
def blur_model():
    sharp = [dead_leaves(80, seed=seed) for seed in range(30, 40)]
    rows = [extract_features(image).as_array() for image in sharp]
    rows += [extract_features(_blur(image)).as_array() for image in sharp]
    scores = [8.0] * len(sharp) + [2.0] * len(sharp)
    return train_two_stage(np.stack(rows), scores, trees=15, params=ForestParams(min_leaf=2), seed=0, kind="concat")


def test_sharp_candidate_wins_against_blurred_copy(natural_image, blur_model):
    result = grid_fuse([natural_image, _blur(natural_image)], model=blur_model, grid=2, overlap=16)
    np.testing.assert_array_equal(result.region_map.winners, 0)
    np.testing.assert_allclose(result.image, natural_image.data, atol=1e-12)
    assert np.all(result.region_map.candidate_scores[..., 0] > result.region_map.candidate_scores[..., 1])


def test_losing_candidate_does_not_change_winners(rng):
    candidates = [rng.uniform(0.2, 1.0, (128, 128)) for _ in range(3)]
    before = grid_fuse(candidates, grid=3, overlap=8, scorer=mean_scorer)
    after = grid_fuse(candidates + [np.zeros((128, 128))], grid=3, overlap=8, scorer=mean_scorer)
    np.testing.assert_array_equal(after.region_map.winners, before.region_map.winners)
    np.testing.assert_array_equal(after.image, before.image)
    assert after.region_map.candidate_scores.shape[-1] == 4
