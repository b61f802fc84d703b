import json
import numpy as np
import pytest
from srqa.core.imgcore import GrayImage, load_image, load_color, save_image
from srqa.core.regress import train_two_stage, save_model
from srqa.core.synth import dead_leaves


@pytest.fixture
def model_file(tmp_path, rng):
    X = rng.uniform(size=(30, 138))
    model = train_two_stage(X, rng.uniform(0, 10, 30), trees=3, seed=0)
    path = tmp_path / "model.json"
    save_model(model, path)
    return str(path)


def write_manifest_images(directory, count=4):
    lines = ["image_path,ref_id,method,s,sigma,score"]
    for index in range(count):
        save_image(dead_leaves(64, seed=30 + index), directory / f"img{index}.png")
        lines.append(f"img{index}.png,ref{index},bicubic,2,0.8,{2.0 + 1.5 * index}")
    path = directory / "manifest.csv"
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def test_features_json(runner, image_file):
    result = runner.invoke(args=["features", image_file])
    assert result.exit_code == 0, result.output
    record = json.loads(result.output)
    assert record["feature_count"] == 138
    assert len(record["local"]) + len(record["global"]) + len(record["spatial"]) == 138
    assert "global_gamma_s0_o0" in record["global"]


def test_features_are_repeatable(runner, tmp_path, image_file):
    first, second = tmp_path / "first.csv", tmp_path / "second.csv"
    for out, extra in ((first, []), (second, ["--no-cache"])):
        result = runner.invoke(args=["features", image_file, "--format", "csv", "--out", str(out)] + extra)
        assert result.exit_code == 0, result.output
        assert "Wrote 138 features" in result.output
    assert first.read_bytes() == second.read_bytes()
    assert len(first.read_text().splitlines()) == 139


def test_features_rejects_tiny_image(runner, tmp_path):
    path = tmp_path / "tiny.png"
    save_image(GrayImage(np.full((8, 8), 0.5)), path)
    result = runner.invoke(args=["features", str(path)])
    assert result.exit_code == 1
    assert "too small" in result.output


def test_features_rejects_unknown_format(runner, image_file):
    result = runner.invoke(args=["features", image_file, "--format", "xml"])
    assert result.exit_code == 1
    assert "--output-format" in result.output


def test_downsample(runner, tmp_path, image_file):
    out = tmp_path / "lr.png"
    result = runner.invoke(args=["downsample", image_file, "-s", "4", "--sigma", "1.2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert load_image(out).shape == (32, 32)

    result = runner.invoke(args=["downsample", image_file, "--scale", "7", "--out", str(out)])
    assert result.exit_code == 1
    assert "--sigma" in result.output


def test_predict(runner, model_file, image_file):
    result = runner.invoke(args=["predict", model_file, image_file])
    assert result.exit_code == 0, result.output
    text = result.output.strip()
    assert len(text.split(".")[1]) == 1
    assert 0.0 <= float(text) <= 10.0

    result = runner.invoke(args=["predict", model_file, image_file, "--json"])
    document = json.loads(result.output)
    assert set(document["per_forest"]) == {"local", "global", "spatial"}


def test_predict_rejects_bad_model(runner, tmp_path, image_file):
    path = tmp_path / "model.json"
    path.write_text("{}")
    result = runner.invoke(args=["predict", str(path), image_file])
    assert result.exit_code == 1
    assert "corrupt model file" in result.output


def test_train_and_predict(runner, tmp_path):
    manifest = write_manifest_images(tmp_path)
    model = tmp_path / "trained.json"
    result = runner.invoke(args=["train", manifest, "--out", str(model), "--trees", "2", "--min-leaf", "1"])
    assert result.exit_code == 0, result.output
    assert "on 4 images" in result.output
    result = runner.invoke(args=["predict", str(model), str(tmp_path / "img0.png")])
    assert result.exit_code == 0, result.output


def test_train_validates_options(runner, tmp_path):
    manifest = write_manifest_images(tmp_path, count=1)
    result = runner.invoke(args=["train", manifest, "--out", str(tmp_path / "m.json"), "--trees", "0"])
    assert result.exit_code == 1
    assert "--trees" in result.output


def test_aggregate(runner, tmp_path):
    rows = ["image_path,ref_id,method,s,sigma,rating"] + [f"a.png,r1,nearest,2,0.8,{r}" for r in range(10)]
    ratings = tmp_path / "ratings.csv"
    ratings.write_text("\n".join(rows) + "\n")
    out = tmp_path / "manifest.csv"
    result = runner.invoke(args=["aggregate", str(ratings), "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert "Aggregated scores for 1 images" in result.output
    assert out.read_text().splitlines()[1].endswith(",4.5")


def test_fuse(runner, tmp_path, model_file):
    paths = []
    for seed in (40, 41):
        path = tmp_path / f"candidate{seed}.png"
        save_image(dead_leaves(128, seed=seed), path)
        paths.append(str(path))
    out = tmp_path / "fused.png"
    result = runner.invoke(args=["fuse"] + paths + ["--model", model_file, "--grid", "2", "--out", str(out)])
    assert result.exit_code == 0, result.output
    assert load_color(out).shape == (128, 128)
    region_map = json.loads((tmp_path / "fused.json").read_text())
    assert region_map["grid"] == 2 and region_map["candidates"] == paths
    assert np.array(region_map["winners"]).shape == (2, 2)


def test_fuse_needs_two_images(runner, tmp_path, model_file, image_file):
    result = runner.invoke(args=["fuse", image_file, "--model", model_file, "--out", str(tmp_path / "f.png")])
    assert result.exit_code == 1


def test_cache_commands(runner, tmp_path):
    manifest = write_manifest_images(tmp_path, count=2)
    result = runner.invoke(args=["cache", "warm", manifest])
    assert result.exit_code == 0, result.output
    assert "Cached features for 2 images (2 extracted)" in result.output
    result = runner.invoke(args=["cache", "stats"])
    assert result.output.startswith("2 cached feature records")


@pytest.mark.slow
def test_synth_and_evaluate(runner, tmp_path):
    desk = tmp_path / "desk"
    result = runner.invoke(args=["synth", str(desk), "--count", "5", "--size", "96"])
    assert result.exit_code == 0, result.output
    assert "Synthetic manifest with 45 entries" in result.output

    report = tmp_path / "report"
    result = runner.invoke(args=["evaluate", str(desk / "manifest.csv"), "--trees", "100", "--repetitions", "5",
                                 "--out", str(report)])
    assert result.exit_code == 0, result.output
    document = json.loads((report / "report.json").read_text())
    assert document["overall_spearman"] >= 0.8
    assert (report / "predictions.csv").is_file() and (report / "report.csv").is_file()
