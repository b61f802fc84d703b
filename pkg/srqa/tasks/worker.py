from srqa import create_app

# Initialize the Flask app and get the Celery instance for the worker
flask_app = create_app()
celery_app = flask_app.extensions["celery"]

# Import tasks to register them
import srqa.tasks.feature_tasks  # noqa: E402,F401
