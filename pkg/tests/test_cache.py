import json
from unittest.mock import MagicMock, patch

import pytest
import redis

from services.cache import ReportCache
from tests.utils.surfaces import load_fixture


class TestReportCache:
    @pytest.fixture
    def cache(self):
        """Report cache over a mocked redis client"""
        with patch("services.cache.redis.Redis") as client:
            client.return_value = MagicMock()
            yield ReportCache(host="localhost", port=6379, db=0, ttl=60)

    def test_key_is_stable_and_option_sensitive(self):
        config = load_fixture("null_plane")
        key = ReportCache.key(config)
        assert key.startswith("report:")
        assert key == ReportCache.key(load_fixture("null_plane"))
        assert key != ReportCache.key(config, backend="fd")
        assert key != ReportCache.key(config, tol=1e-6)

    def test_hit_returns_decoded_report(self, cache):
        cache.redis_client.get.return_value = json.dumps({"name": "null_plane"})
        assert cache.get_report("report:abc") == {"name": "null_plane"}

    def test_miss(self, cache):
        cache.redis_client.get.return_value = None
        assert cache.get_report("report:abc") is None

    def test_unreadable_entry_is_dropped(self, cache):
        cache.redis_client.get.return_value = "{not json"
        assert cache.get_report("report:abc") is None
        cache.redis_client.delete.assert_called_once_with("report:abc")

    def test_redis_outage_is_a_miss(self, cache):
        cache.redis_client.get.side_effect = redis.exceptions.ConnectionError("down")
        assert cache.get_report("report:abc") is None

    def test_save_uses_ttl(self, cache):
        report = MagicMock()
        report.to_json.return_value = "{}"
        cache.save_report("report:abc", report)
        cache.redis_client.set.assert_called_once_with("report:abc", "{}", ex=60)

    def test_save_survives_outage(self, cache):
        cache.redis_client.set.side_effect = redis.exceptions.ConnectionError("down")
        report = MagicMock()
        report.to_json.return_value = "{}"
        cache.save_report("report:abc", report)
