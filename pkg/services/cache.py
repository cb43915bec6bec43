import hashlib
import json
import logging

import redis

logger = logging.getLogger(__name__)


class ReportCache:
    """Finished reports in redis, keyed by a digest of the surface definition."""

    def __init__(self, host: str, port: int, db: int, ttl: int = None):
        self.redis_client = redis.Redis(host=host, port=port, db=db, decode_responses=True)
        self.ttl = ttl

    @staticmethod
    def key(config, backend=None, tol=None):
        payload = json.dumps(
            {
                "config": json.loads(config.model_dump_json(by_alias=True)),
                "backend": backend,
                "tol": tol,
            },
            sort_keys=True,
        )
        return f"report:{hashlib.sha256(payload.encode()).hexdigest()}"

    def get_report(self, key):
        try:
            raw = self.redis_client.get(key)
        except redis.exceptions.RedisError as e:
            logger.warning("report cache unavailable: %s", e)
            return None
        if not raw:
            return None
        try:
            return json.loads(raw)
        except json.JSONDecodeError:
            logger.warning("dropping unreadable cache entry %s", key)
            self.redis_client.delete(key)
            return None

    def save_report(self, key, report):
        try:
            self.redis_client.set(key, report.to_json(), ex=self.ttl)
        except redis.exceptions.RedisError as e:
            logger.warning("could not cache report %s: %s", key, e)
