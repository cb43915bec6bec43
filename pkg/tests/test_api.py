from unittest.mock import patch

import pytest
from fastapi.testclient import TestClient

import main
from tests.utils.surfaces import fixture_data


class TestApi:
    @pytest.fixture
    def client(self):
        return TestClient(main.app)

    @pytest.fixture
    def cache(self):
        """Cache that always misses"""
        with patch.object(main, "cache_service") as cache:
            cache.key.return_value = "report:test"
            cache.get_report.return_value = None
            yield cache

    @pytest.fixture
    def payload(self):
        """Small null plane definition"""
        data = fixture_data("null_plane")
        data["grid"] = {"n1": 2, "n2": 1}
        data["checks"] = {"run": ["frame", "planar_degenerate"]}
        return data

    def test_submit_runs_and_caches(self, client, cache, payload):
        response = client.post("/checks", json=payload)
        assert response.status_code == 200
        body = response.json()
        assert body["exit_code"] == 0
        assert body["schema"] == 1
        cache.save_report.assert_called_once()

    def test_submit_serves_cached_report(self, client, cache, payload):
        cache.get_report.return_value = {"name": "cached"}
        response = client.post("/checks", json=payload)
        assert response.json() == {"name": "cached"}
        cache.save_report.assert_not_called()

    def test_invalid_definition_is_rejected(self, client, cache, payload):
        payload["ambient"] = {"signs": [1, 1, 1, 1]}
        assert client.post("/checks", json=payload).status_code == 422

    def test_list_fixtures(self, client):
        fixtures = client.get("/fixtures").json()["fixtures"]
        assert "example_ex1" in fixtures
        assert fixtures == sorted(fixtures)

    def test_get_fixture(self, client):
        body = client.get("/fixtures/example_r41").json()
        assert body["config"]["ambient"]["signs"] == [-1, 1, 1, 1]
        assert "backend_trace" in body["checks"]

    @pytest.mark.parametrize("name", ["nope", "..%2Fmain"])
    def test_unknown_fixture(self, client, name):
        assert client.get(f"/fixtures/{name}").status_code == 404
