import pytest
from srqa.cache import FeatureCache
from srqa.core.imgcore import save_image
from srqa.core.synth import dead_leaves
from srqa.tasks.feature_tasks import (warm_feature_cache, extract_features_task, CACHED_KEY, CONTENT_HASH_KEY,
                                      PATH_KEY)


@pytest.fixture
def second_image(tmp_path):
    path = tmp_path / "second.png"
    save_image(dead_leaves(64, seed=2), path)
    return str(path)


def test_warm_deduplicates_and_caches(app, image_file, second_image):
    summaries = warm_feature_cache([image_file, second_image, image_file])
    assert [summary[PATH_KEY] for summary in summaries] == [image_file, second_image]
    assert not any(summary[CACHED_KEY] for summary in summaries)
    assert FeatureCache().count() == 2

    again = warm_feature_cache([second_image])
    assert again[0][CACHED_KEY]
    assert again[0][CONTENT_HASH_KEY] == summaries[1][CONTENT_HASH_KEY]


def test_warm_nothing(app):
    assert warm_feature_cache([]) == []


def test_extract_task_runs_eagerly(app, image_file):
    summary = extract_features_task.delay(image_file).get()
    assert summary[PATH_KEY] == image_file
    assert FeatureCache().get(image_file) is not None
