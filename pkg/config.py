import os


def _env_bool(name, default):
    value = os.environ.get(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


class Config:
    # Sampling
    SEED = int(os.environ.get('TROPCOMM_SEED', 20240229))
    SAMPLE_DENOMINATOR = int(os.environ.get('TROPCOMM_SAMPLE_DENOMINATOR', 256))
    SAMPLE_COUNT = int(os.environ.get('TROPCOMM_SAMPLE_COUNT', 1000))

    # Grid oracle
    GRID_ALPHABET = os.environ.get('TROPCOMM_GRID_ALPHABET', '0,-1,-2,-inf')
    GRID_CAP = int(os.environ.get('TROPCOMM_GRID_CAP', 10_000_000))
    WITNESS_CAP = int(os.environ.get('TROPCOMM_WITNESS_CAP', 10_000))
    ORACLE_SHARDS = int(os.environ.get('TROPCOMM_ORACLE_SHARDS', 8))

    # SVG output
    SVG_SCALE = int(os.environ.get('TROPCOMM_SVG_SCALE', 40))  # px per unit
    SVG_MARGIN = int(os.environ.get('TROPCOMM_SVG_MARGIN', 1))  # units
    SVG_PANEL_GAP = int(os.environ.get('TROPCOMM_SVG_PANEL_GAP', 20))  # px
    TEMPLATE_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'templates')

    # Redis Configuration
    REDIS_HOST = os.environ.get('REDIS_HOST', 'localhost')
    REDIS_PORT = int(os.environ.get('REDIS_PORT', 6379))
    REDIS_DB = int(os.environ.get('REDIS_DB', 0))
    REDIS_PASSWORD = os.environ.get('REDIS_PASSWORD') or None
    CACHE_TIMEOUT = int(os.environ.get('TROPCOMM_CACHE_TIMEOUT', 24 * 3600))
    CACHE_ENABLED = _env_bool('TROPCOMM_CACHE_ENABLED', False)

    # Celery Configuration
    CELERY_BROKER_URL = os.environ.get('CELERY_BROKER_URL', 'redis://localhost:6379/1')
    CELERY_RESULT_BACKEND = os.environ.get('CELERY_RESULT_BACKEND', 'redis://localhost:6379/2')
    CELERY_TIMEZONE = os.environ.get('CELERY_TIMEZONE', 'UTC')
    CELERY_ENABLE_UTC = True
    CELERY_RESULT_TIMEOUT = int(os.environ.get('TROPCOMM_CELERY_RESULT_TIMEOUT', 600))  # seconds
