import json
import numpy as np
import pytest
from srqa.core.regress import train_two_stage, save_model, load_model, predict_quality_batch
from srqa.errors import ModelFormatError, ModelVersionError


@pytest.fixture
def trained(rng):
    X = rng.uniform(size=(30, 138))
    y = 4 * X[:, 3] + 2 * X[:, 40] + X[:, 90]
    return train_two_stage(X, y, trees=3, seed=1), X


def test_round_trip_preserves_predictions(tmp_path, trained):
    model, X = trained
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.kind == model.kind
    np.testing.assert_array_equal(loaded.weights, model.weights)
    assert loaded.intercept == model.intercept
    assert loaded.train_meta["trees"] == 3
    for original, restored in zip(model.forests, loaded.forests):
        assert restored.feature_dim == original.feature_dim
        for a, b in zip(original.trees, restored.trees):
            np.testing.assert_array_equal(a.threshold, b.threshold)
            np.testing.assert_array_equal(a.value, b.value)
    np.testing.assert_array_equal(predict_quality_batch(loaded, X)[0], predict_quality_batch(model, X)[0])


def test_same_seed_writes_identical_files(tmp_path, rng):
    X = rng.uniform(size=(30, 138))
    y = rng.uniform(0, 10, 30)
    save_model(train_two_stage(X, y, trees=2, seed=5), tmp_path / "a.json")
    save_model(train_two_stage(X, y, trees=2, seed=5), tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_truncated_file_is_rejected(tmp_path, trained):
    path = tmp_path / "model.json"
    save_model(trained[0], path)
    content = path.read_bytes()
    path.write_bytes(content[:len(content) // 2])
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_version_mismatch(tmp_path, trained):
    path = tmp_path / "model.json"
    save_model(trained[0], path)
    document = json.loads(path.read_text())
    document["version"] += 1
    path.write_text(json.dumps(document))
    with pytest.raises(ModelVersionError):
        load_model(path)


def test_malformed_documents(tmp_path, trained):
    path = tmp_path / "model.json"
    save_model(trained[0], path)
    document = json.loads(path.read_text())

    broken = dict(document, weights=[1.0])
    path.write_text(json.dumps(broken))
    with pytest.raises(ModelFormatError):
        load_model(path)

    document["forests"][0]["trees"][0]["left"] = [999] * len(document["forests"][0]["trees"][0]["left"])
    path.write_text(json.dumps(document))
    with pytest.raises(ModelFormatError):
        load_model(path)

    path.write_text(json.dumps({"format": "something-else"}))
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_missing_file(tmp_path):
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / "absent.json")
