"""Image-quality algorithms. Nothing in this package touches Flask, the database or Celery."""
