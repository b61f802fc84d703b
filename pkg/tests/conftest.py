import numpy as np
import pytest
from srqa import create_app, db
from srqa.core.imgcore import GrayImage, save_image
from srqa.core.synth import dead_leaves

NATURAL_SIZE = 128
CORPUS_SEEDS = (11, 12, 13, 14, 15)


@pytest.fixture
def app(tmp_path):
    app = create_app({
        "TESTING": True,
        "SQLALCHEMY_DATABASE_URI": f"sqlite:///{tmp_path / 'features.db'}",
        "SRQA_CACHE_DIR": str(tmp_path),
        "SRQA_THREADS": 1,
        "CELERY": {"broker_url": "memory://", "result_backend": None,
                   "task_always_eager": True, "task_eager_propagates": True},
    })
    with app.app_context():
        yield app
        db.session.remove()


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture(scope="session")
def natural_image():
    return dead_leaves(NATURAL_SIZE, seed=7)


@pytest.fixture(scope="session")
def natural_corpus():
    return [dead_leaves(NATURAL_SIZE, seed=seed) for seed in CORPUS_SEEDS]


@pytest.fixture
def image_file(tmp_path, natural_image):
    path = tmp_path / "natural.png"
    save_image(natural_image, path)
    return str(path)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


def constant_image(value, size=64):
    return GrayImage(np.full((size, size), value))
