"""Hub client: offline fixtures, caching, retries, and failure modes."""

from __future__ import annotations

import json

import httpx
import pytest

from oneeval.errors import CorruptDownloadError, NotFoundError, TransportError
from oneeval.hub import DatasetCard, HubClient, load_cached_rows, query_fingerprint
from oneeval.model import sanitize_repo_id


@pytest.fixture()
def offline(hub_fixtures):
    return HubClient(offline_dir=hub_fixtures)


class TestSearch:
    def test_keyed_fixture(self, offline):
        results = offline.search_datasets("gsm8k", limit=5)
        assert any(repo == "openai/gsm8k" for repo, _, _ in results)

    def test_limit_respected(self, offline):
        assert len(offline.search_datasets("gsm8k", limit=1)) == 1

    def test_wildcard_default(self, offline):
        results = offline.search_datasets("some never-seen query", limit=5)
        assert results  # served by _default.json

    def test_missing_fixture_and_no_wildcard(self, tmp_path):
        (tmp_path / "search").mkdir(parents=True)
        client = HubClient(offline_dir=tmp_path)
        with pytest.raises(TransportError):
            client.search_datasets("anything")

    def test_bad_limit(self, offline):
        with pytest.raises(ValueError):
            offline.search_datasets("x", limit=0)


class TestCards:
    def test_gsm8k_card(self, offline):
        card = offline.fetch_dataset_card("openai/gsm8k")
        assert "main" in card.configs
        assert {"train", "test"} <= set(card.splits_per_config["main"])
        names = [n for n, _ in card.features("main")]
        assert {"question", "answer"} <= set(names)

    def test_truthful_qa_has_validation_not_test(self, offline):
        card = offline.fetch_dataset_card("truthful_qa")
        splits = card.splits_per_config["generation"]
        assert "validation" in splits and "test" not in splits

    def test_unknown_repo_is_not_found(self, offline):
        with pytest.raises(NotFoundError):
            offline.fetch_dataset_card("no/such-repo")

    def test_card_split_config_consistency(self):
        with pytest.raises(ValueError):
            DatasetCard.from_dict({
                "repo_id": "x/y", "configs": ["a"], "splits_per_config": {"ghost": ["test"]},
            })


class TestDownload:
    def test_download_writes_canonical_path(self, offline, tmp_path):
        path, count = offline.download_split("openai/gsm8k", "main", "test", tmp_path)
        card = offline.fetch_dataset_card("openai/gsm8k")
        expected = tmp_path / "openai__gsm8k" / card.revision / "main" / "test.jsonl"
        assert path == expected and count == 20
        meta = json.loads((path.parent / "meta.json").read_text())
        assert meta["repo_id"] == "openai/gsm8k" and meta["rows"] == 20
        assert "retrieved_at" in meta

    def test_idempotent_second_call(self, offline, tmp_path):
        events = []
        offline.recorder = events.append
        first, _ = offline.download_split("openai/gsm8k", "main", "test", tmp_path)
        second, count = offline.download_split("openai/gsm8k", "main", "test", tmp_path)
        assert first == second and count == 20
        assert len([e for e in events if e["event"] == "download"]) == 1

    def test_cache_path_pure_function(self, offline, tmp_path):
        a = offline.cache_path_for(tmp_path, "openai/gsm8k", "rev1", "main", "test")
        b = offline.cache_path_for(tmp_path, "openai/gsm8k", "rev1", "main", "test")
        c = offline.cache_path_for(tmp_path, "openai/gsm8k", "rev2", "main", "test")
        assert a == b and a != c

    def test_unknown_split_is_not_found(self, offline, tmp_path):
        with pytest.raises(NotFoundError):
            offline.download_split("openai/gsm8k", "main", "no-such-split", tmp_path)

    def test_truncated_fixture_is_corrupt_download(self, tmp_path):
        fixture_dir = tmp_path / "fixtures"
        (fixture_dir / "cards").mkdir(parents=True)
        (fixture_dir / "cards" / "org__broken.json").write_text(json.dumps({
            "repo_id": "org/broken", "configs": ["default"], "splits_per_config": {"default": ["test"]},
            "features_per_config": {}, "revision": "r1",
        }))
        rows_dir = fixture_dir / "rows" / "org__broken" / "default"
        rows_dir.mkdir(parents=True)
        (rows_dir / "test.jsonl").write_text('{"question": "ok"}\n{"question": truncated')
        client = HubClient(offline_dir=fixture_dir)
        cache = tmp_path / "cache"
        with pytest.raises(CorruptDownloadError):
            client.download_split("org/broken", "default", "test", cache)
        assert not client.cache_path_for(cache, "org/broken", "r1", "default", "test").exists()

    def test_csv_fixture_normalized_to_jsonl(self, tmp_path):
        fixture_dir = tmp_path / "fixtures"
        (fixture_dir / "cards").mkdir(parents=True)
        (fixture_dir / "cards" / "org__csv.json").write_text(json.dumps({
            "repo_id": "org/csv", "configs": ["default"], "splits_per_config": {"default": ["test"]},
            "features_per_config": {}, "revision": "r1",
        }))
        rows_dir = fixture_dir / "rows" / "org__csv" / "default"
        rows_dir.mkdir(parents=True)
        (rows_dir / "test.csv").write_text("question,answer\nwhat,42\n")
        client = HubClient(offline_dir=fixture_dir)
        path, count = client.download_split("org/csv", "default", "test", tmp_path / "cache")
        assert count == 1
        assert load_cached_rows(path) == [{"question": "what", "answer": "42"}]


class TestHttpMode:
    def card_payload(self):
        return {
            "repo_id": "org/x", "configs": ["default"], "splits_per_config": {"default": ["test"]},
            "features_per_config": {"default": [["question", "string"], ["answer", "string"]]},
            "revision": "deadbee", "description": "test set", "downloads": 5,
        }

    def test_retry_then_success(self):
        attempts = []

        def handler(request):
            attempts.append(request.url.path)
            if len(attempts) < 3:
                return httpx.Response(500)
            return httpx.Response(200, json=self.card_payload())

        naps = []
        client = HubClient(base_url="http://hub.test", transport=httpx.MockTransport(handler), sleeper=naps.append)
        card = client.fetch_dataset_card("org/x")
        assert card.revision == "deadbee"
        assert len(attempts) == 3
        assert naps == [0.5, 1.0]  # exponential backoff before attempts 2 and 3

    def test_retries_exhausted(self):
        client = HubClient(
            base_url="http://hub.test",
            transport=httpx.MockTransport(lambda r: httpx.Response(500)),
            sleeper=lambda _: None,
        )
        with pytest.raises(TransportError):
            client.fetch_dataset_card("org/x")

    def test_404_is_not_found_without_retry(self):
        attempts = []

        def handler(request):
            attempts.append(1)
            return httpx.Response(404)

        client = HubClient(base_url="http://hub.test", transport=httpx.MockTransport(handler), sleeper=lambda _: None)
        with pytest.raises(NotFoundError):
            client.fetch_dataset_card("org/missing")
        assert len(attempts) == 1

    def test_search_over_http(self):
        def handler(request):
            assert request.url.params["search"] == "math"
            return httpx.Response(200, json=[{"id": "org/math", "description": "числа", "downloads": 7}])

        client = HubClient(base_url="http://hub.test", transport=httpx.MockTransport(handler))
        assert client.search_datasets("math", limit=3) == [("org/math", "числа", 7)]


def test_query_fingerprint_is_stable():
    assert query_fingerprint("GSM8K ") == query_fingerprint("gsm8k")
    assert len(query_fingerprint("x")) == 16


def test_sanitized_layout(hub_fixtures):
    assert (hub_fixtures / "cards" / f"{sanitize_repo_id('openai/gsm8k')}.json").exists()
