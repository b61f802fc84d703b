import numpy as np
import pytest
from srqa.core.harness import load_manifest
from srqa.core.imgcore import downsample, load_image
from srqa.core.synth import dead_leaves, back_projection, upsample, pseudo_score, build_synthetic_dataset, UPSAMPLERS
from srqa.errors import ParameterError


def test_dead_leaves_is_seeded():
    first = dead_leaves(64, seed=3)
    assert first.shape == (64, 64)
    assert 0.0 <= first.data.min() and first.data.max() <= 1.0
    np.testing.assert_array_equal(first.data, dead_leaves(64, seed=3).data)
    assert not np.array_equal(first.data, dead_leaves(64, seed=4).data)


@pytest.mark.parametrize("method", UPSAMPLERS)
def test_upsamplers_restore_size(natural_image, method):
    lr = downsample(natural_image, 4, 1.2)
    assert upsample(lr, 4, 1.2, method).shape == (128, 128)


def test_back_projection_matches_low_resolution_input(natural_image):
    lr = downsample(natural_image, 2, 0.8)

    def reimaging_error(estimate):
        return np.sqrt(np.mean((downsample(estimate, 2, 0.8).data - lr.data) ** 2))

    assert reimaging_error(back_projection(lr, 2, 0.8)) < reimaging_error(back_projection(lr, 2, 0.8, iterations=0))


def test_unknown_upsampler(natural_image):
    with pytest.raises(ParameterError):
        upsample(natural_image, 2, 0.8, "lanczos")


def test_pseudo_scores_follow_scale_and_sharpness(rng):
    for method in UPSAMPLERS:
        scores = [pseudo_score(s, method, rng) for s in (2, 3, 4)]
        assert scores == sorted(scores, reverse=True)
    for s in (2, 3, 4):
        scores = [pseudo_score(s, method, rng) for method in ("nearest", "bilinear", "backprojection")]
        assert scores == sorted(scores)
        assert all(0.0 <= score <= 10.0 for score in scores)


def test_build_dataset(tmp_path):
    manifest = build_synthetic_dataset(tmp_path / "desk", scales=(2, 3), count=2, size=96, seed=1)
    entries = load_manifest(manifest)
    assert len(entries) == 2 * 2 * len(UPSAMPLERS)
    assert {entry.ref_id for entry in entries} == {"ref00", "ref01"}
    assert {(entry.s, entry.sigma) for entry in entries} == {(2, 0.8), (3, 1.0)}
    assert all(load_image(entry.image_path).shape == (96, 96) for entry in entries)


def test_build_dataset_is_reproducible(tmp_path):
    first = build_synthetic_dataset(tmp_path / "a", scales=(2,), count=1, size=72, seed=5)
    second = build_synthetic_dataset(tmp_path / "b", scales=(2,), count=1, size=72, seed=5)
    assert open(first).read() == open(second).read()


def test_build_dataset_from_sources(tmp_path, image_file):
    entries = load_manifest(build_synthetic_dataset(tmp_path / "desk", sources=[image_file], scales=(4,)))
    assert len(entries) == len(UPSAMPLERS)


def test_unsupported_scale(tmp_path):
    with pytest.raises(ParameterError):
        build_synthetic_dataset(tmp_path, scales=(7,))
