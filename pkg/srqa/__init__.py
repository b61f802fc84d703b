import logging
import os
from dotenv import load_dotenv
from flask import Flask
from flask_sqlalchemy import SQLAlchemy
from flask_migrate import Migrate
from srqa.constants import (CACHE_DIR_ENV, DATABASE_URI_ENV, THREADS_ENV, LOG_LEVEL_ENV, CELERY_BROKER_URL_ENV,
                            CELERY_RESULT_BACKEND_ENV, CACHE_DIR_CONFIG_KEY, THREADS_CONFIG_KEY, CELERY_CONFIG_KEY,
                            DEFAULT_CACHE_DIR, DEFAULT_CACHE_DB_NAME, DEFAULT_THREADS, DEFAULT_LOG_LEVEL)

db = SQLAlchemy()
migrate = Migrate()

MIGRATIONS_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "migrations")


def create_app(test_config=None):
    load_dotenv()
    app = Flask(__name__)

    cache_dir = os.path.abspath(os.getenv(CACHE_DIR_ENV, DEFAULT_CACHE_DIR))
    app.config[CACHE_DIR_CONFIG_KEY] = cache_dir
    app.config["SQLALCHEMY_DATABASE_URI"] = os.getenv(
        DATABASE_URI_ENV, f"sqlite:///{os.path.join(cache_dir, DEFAULT_CACHE_DB_NAME)}")
    app.config["SQLALCHEMY_TRACK_MODIFICATIONS"] = False

    threads_env = os.getenv(THREADS_ENV)
    try:
        threads = (int(threads_env) if threads_env else DEFAULT_THREADS)
    except ValueError:
        threads = DEFAULT_THREADS
    app.config[THREADS_CONFIG_KEY] = max(1, threads)

    broker_url = os.getenv(CELERY_BROKER_URL_ENV)
    app.config[CELERY_CONFIG_KEY] = {
        "broker_url": broker_url,
        "result_backend": os.getenv(CELERY_RESULT_BACKEND_ENV, broker_url),
        # no broker: run tasks in-process
        "task_always_eager": not broker_url,
        "task_eager_propagates": True,
    }

    if test_config:
        app.config.update(test_config)

    logging.basicConfig(level=os.getenv(LOG_LEVEL_ENV, DEFAULT_LOG_LEVEL),
                        format="%(levelname)-5.5s [%(name)s] %(message)s")

    if app.config["SQLALCHEMY_DATABASE_URI"].startswith("sqlite:///"):
        os.makedirs(app.config[CACHE_DIR_CONFIG_KEY], exist_ok=True)

    db.init_app(app)
    migrate.init_app(app, db, directory=MIGRATIONS_DIR)
    from srqa.tasks.celery_app import celery_init_app
    celery_init_app(app)

    from srqa.commands.features.cli import features_bp
    from srqa.commands.model.cli import model_bp
    from srqa.commands.evaluate.cli import evaluate_bp
    from srqa.commands.imaging.cli import imaging_bp
    from srqa.models import FeatureRecord

    app.register_blueprint(features_bp)
    app.register_blueprint(model_bp)
    app.register_blueprint(evaluate_bp)
    app.register_blueprint(imaging_bp)

    return app
