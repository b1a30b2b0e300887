"""Dataset hub access: search, card fetch, and split download into a cache.

Two modes share one interface: an HTTP client against hub REST endpoints,
and a fully offline mode serving fixtures from a directory tree (the mode
the test suite runs in).  Rows are normalized to JSONL whatever the
upstream format, so downstream validation and scoring have one ingestion
path.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

import httpx

from .errors import CorruptDownloadError, NotFoundError, TransportError
from .model import sanitize_repo_id

logger = logging.getLogger(__name__)

ENV_HUB_BASE_URL = "ONEEVAL_HUB_BASE_URL"
DEFAULT_HUB_BASE_URL = "https://huggingface.co"
RETRY_DELAYS = (0.5, 1.0, 2.0)
DOWNLOAD_PARALLELISM = 4


@dataclass
class DatasetCard:
    repo_id: str
    configs: list[str]
    splits_per_config: dict[str, list[str]]
    features_per_config: dict[str, list[tuple[str, str]]]
    revision: str = "unversioned"
    description: str = ""
    downloads: int = 0

    def validate(self) -> None:
        for config in self.splits_per_config:
            if config not in self.configs:
                raise ValueError(f"card {self.repo_id}: split config {config!r} not among configs")

    def features(self, config: str) -> list[tuple[str, str]]:
        return self.features_per_config.get(config, [])

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DatasetCard":
        card = cls(
            repo_id=d["repo_id"],
            configs=list(d["configs"]),
            splits_per_config={k: list(v) for k, v in d["splits_per_config"].items()},
            features_per_config={k: [tuple(pair) for pair in v] for k, v in d.get("features_per_config", {}).items()},
            revision=d.get("revision", "unversioned"),
            description=d.get("description", ""),
            downloads=int(d.get("downloads", 0)),
        )
        card.validate()
        return card

    def to_dict(self) -> dict[str, Any]:
        return {
            "repo_id": self.repo_id,
            "configs": list(self.configs),
            "splits_per_config": {k: list(v) for k, v in self.splits_per_config.items()},
            "features_per_config": {k: [list(pair) for pair in v] for k, v in self.features_per_config.items()},
            "revision": self.revision,
            "description": self.description,
            "downloads": self.downloads,
        }


def _rows_from_text(text: str, suffix: str) -> list[dict[str, Any]]:
    """Parse rows from JSONL / JSON array / CSV into dicts."""
    if suffix == ".csv":
        reader = csv.DictReader(io.StringIO(text))
        return [dict(row) for row in reader]
    stripped = text.strip()
    if suffix == ".json" or stripped.startswith("["):
        data = json.loads(stripped)
        if not isinstance(data, list):
            raise ValueError("expected a JSON array of rows")
        return data
    rows = []
    for line_no, line in enumerate(stripped.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            rows.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ValueError(f"bad JSONL at line {line_no}: {exc.msg}") from exc
    return rows


def query_fingerprint(query: str) -> str:
    return hashlib.sha256(query.strip().lower().encode("utf-8")).hexdigest()[:16]


class HubClient:
    """Search, metadata, and split download with a reproducible cache.

    ``offline_dir`` switches to fixture mode: zero network operations, with
    search results keyed by query hash (wildcard ``_default.json``), cards
    under ``cards/``, and rows under ``rows/<repo>/<config>/<split>.*``.
    """

    def __init__(
        self,
        base_url: Optional[str] = None,
        offline_dir: Optional[str | Path] = None,
        token: Optional[str] = None,
        transport=None,
        sleeper: Callable[[float], None] = time.sleep,
        recorder: Optional[Callable[[dict[str, Any]], None]] = None,
    ):
        self.offline_dir = Path(offline_dir) if offline_dir else None
        self.base_url = (base_url or os.environ.get(ENV_HUB_BASE_URL, DEFAULT_HUB_BASE_URL)).rstrip("/")
        self.sleeper = sleeper
        self.recorder = recorder
        self._client: Optional[httpx.Client] = None
        if self.offline_dir is None:
            headers = {"Authorization": f"Bearer {token}"} if token else {}
            self._client = httpx.Client(base_url=self.base_url, headers=headers, timeout=60.0, transport=transport)

    # -- transport ---------------------------------------------------------

    def _get(self, path: str, params: Optional[dict] = None) -> httpx.Response:
        assert self._client is not None
        last_exc: Optional[Exception] = None
        for attempt, delay in enumerate((0.0,) + RETRY_DELAYS):
            if delay:
                self.sleeper(delay)
            try:
                response = self._client.get(path, params=params)
            except httpx.HTTPError as exc:
                last_exc = exc
                continue
            if response.status_code == 404:
                raise NotFoundError(f"{path} not found on hub")
            if response.status_code >= 500:
                last_exc = TransportError(f"{path}: HTTP {response.status_code}")
                continue
            if response.status_code >= 400:
                raise TransportError(f"{path}: HTTP {response.status_code}")
            return response
        raise TransportError(f"hub request {path} failed after {1 + len(RETRY_DELAYS)} attempts: {last_exc}")

    # -- search ------------------------------------------------------------

    def search_datasets(self, query: str, limit: int = 10) -> list[tuple[str, str, int]]:
        """(repo_id, description, downloads) triples ordered by hub relevance."""
        if limit < 1:
            raise ValueError("limit must be >= 1")
        if self.offline_dir is not None:
            results = self._offline_search(query)
        else:
            response = self._get("/api/datasets", params={"search": query, "limit": limit})
            results = [
                (item["id"], item.get("description", ""), int(item.get("downloads", 0)))
                for item in response.json()
            ]
        return results[:limit]

    def _offline_search(self, query: str) -> list[tuple[str, str, int]]:
        search_dir = self.offline_dir / "search"
        keyed = search_dir / f"{query_fingerprint(query)}.json"
        wildcard = search_dir / "_default.json"
        path = keyed if keyed.exists() else wildcard
        if not path.exists():
            raise TransportError(f"offline hub has no search fixture for {query!r} and no wildcard default")
        data = json.loads(path.read_text(encoding="utf-8"))
        return [(item["repo_id"], item.get("description", ""), int(item.get("downloads", 0))) for item in data]

    # -- metadata ----------------------------------------------------------

    def fetch_dataset_card(self, repo_id: str) -> DatasetCard:
        if not repo_id:
            raise ValueError("repo_id must be non-empty")
        if self.offline_dir is not None:
            path = self.offline_dir / "cards" / f"{sanitize_repo_id(repo_id)}.json"
            if not path.exists():
                raise NotFoundError(f"no card fixture for {repo_id!r}")
            return DatasetCard.from_dict(json.loads(path.read_text(encoding="utf-8")))
        response = self._get(f"/api/datasets/{repo_id}/card")
        return DatasetCard.from_dict(response.json())

    # -- acquisition -------------------------------------------------------

    def cache_path_for(self, cache_root: str | Path, repo_id: str, revision: str, config: str, split: str) -> Path:
        return Path(cache_root) / sanitize_repo_id(repo_id) / revision / config / f"{split}.jsonl"

    def download_split(self, repo_id: str, config: str, split: str, cache_root: str | Path) -> tuple[Path, int]:
        """Materialize rows as JSONL at the canonical cache path (idempotent)."""
        card = self.fetch_dataset_card(repo_id)
        if config not in card.configs or split not in card.splits_per_config.get(config, []):
            raise NotFoundError(f"{repo_id}: no split {config}/{split} on the card")
        target = self.cache_path_for(cache_root, repo_id, card.revision, config, split)
        meta_path = target.parent / "meta.json"
        if target.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {}
            return target, int(meta.get("rows", sum(1 for _ in target.open())))

        rows = self._fetch_rows(repo_id, config, split)
        target.parent.mkdir(parents=True, exist_ok=True)
        lock_path = target.parent / f".{split}.lock"
        with _EntryLock(lock_path):
            if target.exists():
                meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {}
                return target, int(meta.get("rows", sum(1 for _ in target.open())))
            tmp = target.parent / f".{split}.tmp"
            try:
                with tmp.open("w", encoding="utf-8") as fh:
                    for row in rows:
                        fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
                tmp.replace(target)
            except (OSError, TypeError, ValueError) as exc:
                tmp.unlink(missing_ok=True)
                raise CorruptDownloadError(f"{repo_id} {config}/{split}: {exc}") from exc
            meta_path.write_text(
                json.dumps(
                    {
                        "repo_id": repo_id,
                        "revision": card.revision,
                        "config": config,
                        "split": split,
                        "rows": len(rows),
                        "retrieved_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
                    },
                    indent=2,
                ),
                encoding="utf-8",
            )
        if self.recorder:
            self.recorder({"event": "download", "repo_id": repo_id, "revision": card.revision, "config": config, "split": split, "cache_path": str(target), "rows": len(rows)})
        return target, len(rows)

    def _fetch_rows(self, repo_id: str, config: str, split: str) -> list[dict[str, Any]]:
        if self.offline_dir is not None:
            base = self.offline_dir / "rows" / sanitize_repo_id(repo_id) / config
            for suffix in (".jsonl", ".json", ".csv"):
                path = base / f"{split}{suffix}"
                if path.exists():
                    try:
                        return _rows_from_text(path.read_text(encoding="utf-8"), suffix)
                    except ValueError as exc:
                        raise CorruptDownloadError(f"{repo_id} {config}/{split}: {exc}") from exc
            raise NotFoundError(f"no row fixture for {repo_id} {config}/{split}")
        response = self._get(f"/api/datasets/{repo_id}/rows", params={"config": config, "split": split})
        content_type = response.headers.get("content-type", "")
        suffix = ".csv" if "csv" in content_type else ".jsonl"
        try:
            return _rows_from_text(response.text, suffix)
        except ValueError as exc:
            raise CorruptDownloadError(f"{repo_id} {config}/{split}: {exc}") from exc


class _EntryLock:
    """Single-writer lock per cache entry via an exclusive lock file."""

    def __init__(self, path: Path, timeout: float = 30.0):
        self.path = path
        self.timeout = timeout

    def __enter__(self):
        deadline = time.monotonic() + self.timeout
        while True:
            try:
                fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
                os.close(fd)
                return self
            except FileExistsError:
                if time.monotonic() > deadline:
                    raise TransportError(f"timed out waiting for cache lock {self.path}")
                time.sleep(0.05)

    def __exit__(self, *exc_info):
        try:
            self.path.unlink()
        except OSError:
            pass
        return False


def load_cached_rows(cache_path: str | Path, limit: Optional[int] = None) -> list[dict[str, Any]]:
    rows = []
    with open(cache_path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rows.append(json.loads(line))
            if limit is not None and len(rows) >= limit:
                break
    return rows
