"""Local benchmark registry: curated, ready-to-run entries with aliases and tags.

The gallery file is validated on load; id/alias collisions are a hard error
because silent mis-resolution would corrupt plans downstream.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .errors import GalleryError
from .model import KeyMapping, TaskType

logger = logging.getLogger(__name__)


@dataclass
class GalleryEntry:
    id: str
    canonical_repo: str
    aliases: list[str]
    category_tags: list[str]
    task_type: TaskType
    description: str
    hf_config: str
    eval_split: str
    key_mapping: KeyMapping
    metrics_override: Optional[list[str]] = None

    def retrieval_text(self) -> str:
        """Document text the retrieval backends index."""
        return " ".join([self.description, " ".join(self.category_tags), " ".join(self.aliases)])

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "canonical_repo": self.canonical_repo,
            "aliases": list(self.aliases),
            "category_tags": list(self.category_tags),
            "task_type": self.task_type.value,
            "description": self.description,
            "hf_config": self.hf_config,
            "eval_split": self.eval_split,
            "key_mapping": self.key_mapping.to_dict(),
            "metrics_override": list(self.metrics_override) if self.metrics_override else None,
        }


_REQUIRED_FIELDS = ("id", "canonical_repo", "aliases", "category_tags", "task_type", "description", "hf_config", "eval_split", "key_mapping")


class Gallery:
    def __init__(self, entries: list[GalleryEntry]):
        self.entries = entries
        self._by_id = {e.id.lower(): e for e in entries}
        self._by_alias: dict[str, GalleryEntry] = {}
        self._by_repo = {e.canonical_repo.lower(): e for e in entries}
        for e in entries:
            for alias in e.aliases:
                self._by_alias[alias.lower()] = e

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def lookup(self, name: str) -> Optional[GalleryEntry]:
        """Case-insensitive match over ids, aliases, and canonical repos.

        Exact-id matches win over alias matches.
        """
        if not name:
            return None
        key = name.strip().lower()
        return self._by_id.get(key) or self._by_alias.get(key) or self._by_repo.get(key)

    def by_repo(self, repo_id: str) -> Optional[GalleryEntry]:
        return self._by_repo.get(repo_id.lower())

    def tags(self) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.entries:
            for tag in e.category_tags:
                seen.setdefault(tag, None)
        return list(seen)


def _parse_entry(raw: dict, position: int) -> GalleryEntry:
    for fieldname in _REQUIRED_FIELDS:
        if fieldname not in raw:
            raise GalleryError(f"entry #{position} ({raw.get('id', '?')}): missing field {fieldname!r}")
    if not raw["description"]:
        raise GalleryError(f"entry {raw['id']!r}: description must be non-empty")
    try:
        task_type = TaskType(raw["task_type"])
    except ValueError as exc:
        raise GalleryError(f"entry {raw['id']!r}: bad task_type {raw['task_type']!r}") from exc
    try:
        mapping = KeyMapping.from_dict(raw["key_mapping"])
        mapping.validate()
    except (KeyError, ValueError) as exc:
        raise GalleryError(f"entry {raw['id']!r}: bad key_mapping: {exc}") from exc
    override = raw.get("metrics_override")
    return GalleryEntry(
        id=raw["id"],
        canonical_repo=raw["canonical_repo"],
        aliases=list(raw["aliases"]),
        category_tags=list(raw["category_tags"]),
        task_type=task_type,
        description=raw["description"],
        hf_config=raw["hf_config"],
        eval_split=raw["eval_split"],
        key_mapping=mapping,
        metrics_override=list(override) if override else None,
    )


def load_gallery(path: str | Path) -> Gallery:
    """Load and validate the gallery file; collisions and schema errors abort."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GalleryError(f"cannot load gallery {path}: {exc}") from exc
    raw_entries = raw.get("entries") if isinstance(raw, dict) else raw
    if not isinstance(raw_entries, list):
        raise GalleryError(f"{path}: expected an object with an 'entries' list")

    entries = [_parse_entry(item, i) for i, item in enumerate(raw_entries)]
    seen_names: dict[str, str] = {}
    for e in entries:
        for name in [e.id] + list(e.aliases):
            key = name.lower()
            if key in seen_names and seen_names[key] != e.id:
                raise GalleryError(f"name {name!r} collides between entries {seen_names[key]!r} and {e.id!r}")
            seen_names.setdefault(key, e.id)
    logger.info("loaded gallery with %d entries from %s", len(entries), path)
    return Gallery(entries)
