import hashlib
import logging
import pickle
from functools import wraps

import redis

from config import Config
from utils import to_json

logger = logging.getLogger(__name__)

# Initialize Redis connection (lazy: nothing is sent until the first command)
redis_client = redis.Redis(
    host=Config.REDIS_HOST,
    port=Config.REDIS_PORT,
    db=Config.REDIS_DB,
    password=Config.REDIS_PASSWORD,
    decode_responses=False,
)


class Cache:
    """Redis cache wrapper for computed reports"""

    def __init__(self, prefix='tropcomm_', client=None):
        self.prefix = prefix
        self.client = client if client is not None else redis_client

    def _get_key(self, key):
        return f"{self.prefix}{key}"

    def set(self, key, value, timeout=None):
        try:
            self.client.setex(self._get_key(key), timeout or Config.CACHE_TIMEOUT, pickle.dumps(value))
            return True
        except redis.RedisError as e:
            logger.warning('cache set failed for %s: %s', key, e)
            return False

    def get(self, key, default=None):
        try:
            value = self.client.get(self._get_key(key))
        except redis.RedisError as e:
            logger.warning('cache get failed for %s: %s', key, e)
            return default
        if value is None:
            logger.debug('cache miss %s', key)
            return default
        logger.debug('cache hit %s', key)
        return pickle.loads(value)

    def clear_pattern(self, pattern):
        """Clear all keys matching a glob pattern"""
        try:
            keys = list(self.client.scan_iter(match=self._get_key(pattern)))
            if keys:
                return self.client.delete(*keys)
            return 0
        except redis.RedisError as e:
            logger.warning('cache clear failed for %s: %s', pattern, e)
            return 0


cache = Cache()


def argument_digest(args, kwargs):
    """Stable digest of call arguments, shared across processes"""
    text = to_json({'args': list(args), 'kwargs': kwargs})
    return hashlib.sha256(text.encode('utf-8')).hexdigest()[:32]


def cached(timeout=None, key_prefix=''):
    """Cache function results in Redis while Config.CACHE_ENABLED is on"""
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            if not Config.CACHE_ENABLED:
                return func(*args, **kwargs)
            cache_key = f"{key_prefix}{func.__name__}_{argument_digest(args, kwargs)}"
            result = cache.get(cache_key)
            if result is not None:
                return result
            result = func(*args, **kwargs)
            cache.set(cache_key, result, timeout)
            return result
        return wrapper
    return decorator


def invalidate_cache_pattern(pattern):
    """Invalidate cache keys matching a pattern, e.g. 'oracle_*'"""
    return cache.clear_pattern(pattern)
