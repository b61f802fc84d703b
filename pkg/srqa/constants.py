# Default configuration values
DEFAULT_CACHE_DIR = ".srqa_cache"
DEFAULT_CACHE_DB_NAME = "features.db"
DEFAULT_THREADS = 1
DEFAULT_LOG_LEVEL = "INFO"

# Environment keys
CACHE_DIR_ENV = "SRQA_CACHE_DIR"
DATABASE_URI_ENV = "SRQA_DATABASE_URI"
THREADS_ENV = "SRQA_THREADS"
LOG_LEVEL_ENV = "SRQA_LOG_LEVEL"
CELERY_BROKER_URL_ENV = "CELERY_BROKER_URL"
CELERY_RESULT_BACKEND_ENV = "CELERY_RESULT_BACKEND"

# App config keys
CACHE_DIR_CONFIG_KEY = "SRQA_CACHE_DIR"
THREADS_CONFIG_KEY = "SRQA_THREADS"
CELERY_CONFIG_KEY = "CELERY"
