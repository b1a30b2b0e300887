"""PlanItem -> validated, executable BenchInfo.

Resolution is local-first with dynamic fallback: gallery registry, then a
direct card fetch by the given name, then hub search ranked by suffix cue,
description similarity, and popularity.  Resolved benchmarks are validated
against real cached rows before a BenchInfo is ever emitted.
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

from .errors import (
    BenchValidationError,
    ConfigError,
    CorruptDownloadError,
    MappingError,
    NotFoundError,
    ResolutionError,
    TransportError,
)
from .exprs import ParseError, parse_expr
from .gallery import Gallery, GalleryEntry
from .hub import DatasetCard, HubClient, load_cached_rows
from .model import BenchInfo, KeyMapping, PlanItem, TaskType, canonical_json_bytes
from .nl2bench import RetrievalConfig, score_texts_tfidf

logger = logging.getLogger(__name__)

VALIDATION_SAMPLE_SIZE = 20
NONEMPTY_THRESHOLD = 0.8
NUMERIC_TASK_THRESHOLD = 0.7

INPUT_KEY_CANDIDATES = ("question", "prompt", "instruction", "input", "problem", "query", "text")
TARGET_KEY_CANDIDATES = ("answer", "target", "output", "solution", "label")
TARGETS_KEY_CANDIDATES = ("correct_answers", "answers", "targets", "references")
CHOICES_KEY_CANDIDATES = ("choices", "options")
LABEL_KEY_CANDIDATES = ("answer", "label", "answerKey")


@dataclass
class ResolvedBenchmark:
    repo_id: str
    provenance: str  # gallery | direct | search
    card: DatasetCard
    gallery_entry: Optional[GalleryEntry] = None


def resolve_benchmark(
    item: PlanItem,
    gallery: Gallery,
    hub_client: HubClient,
    recorder: Optional[Callable[[dict[str, Any]], None]] = None,
) -> ResolvedBenchmark:
    """Three-tier resolution; records which tier fired."""
    name = item.display_name
    entry = gallery.lookup(name) or (gallery.by_repo(item.canonical_id) if item.canonical_id else None)
    if entry is not None:
        card = hub_client.fetch_dataset_card(entry.canonical_repo)
        if recorder:
            recorder({"item": name, "tier": "gallery", "repo_id": entry.canonical_repo})
        return ResolvedBenchmark(entry.canonical_repo, "gallery", card, entry)

    try:
        card = hub_client.fetch_dataset_card(name)
        if recorder:
            recorder({"item": name, "tier": "direct", "repo_id": name})
        return ResolvedBenchmark(name, "direct", card)
    except NotFoundError:
        pass
    except TransportError as exc:
        raise ResolutionError(f"{name}: direct card fetch failed: {exc}") from exc

    try:
        results = hub_client.search_datasets(name, limit=10)
    except TransportError as exc:
        raise ResolutionError(f"{name}: all resolution tiers failed (search unavailable: {exc})") from exc
    if not results:
        raise ResolutionError(f"{name}: no gallery, direct, or search match")
    best = _pick_search_result(name, results)
    card = hub_client.fetch_dataset_card(best)
    if recorder:
        recorder({"item": name, "tier": "search", "repo_id": best, "candidates": [r[0] for r in results]})
    return ResolvedBenchmark(best, "search", card)


def _pick_search_result(query: str, results: list[tuple[str, str, int]]) -> str:
    """suffix cue > description similarity > downloads (strict ordering)."""
    q = query.strip().lower()
    suffix_hits = [r for r in results if r[0].split("/")[-1].lower() == q]
    if suffix_hits:
        return max(suffix_hits, key=lambda r: r[2])[0]
    scores = score_texts_tfidf({repo: f"{repo} {desc}" for repo, desc, _ in results}, query, RetrievalConfig())
    ranked = sorted(results, key=lambda r: (-round(scores.get(r[0], 0.0), 9), -r[2], r[0]))
    return ranked[0][0]


# ---------------------------------------------------------------------------
# Config/split policy
# ---------------------------------------------------------------------------

def choose_config_split(card: DatasetCard, gallery_entry: Optional[GalleryEntry] = None) -> tuple[str, str, str]:
    """Canonical-split policy; the returned rationale is recorded in BenchInfo."""
    if not card.configs:
        raise ConfigError(f"{card.repo_id}: card lists no configs")
    notes: list[str] = []

    if gallery_entry is not None:
        config, split = gallery_entry.hf_config, gallery_entry.eval_split
        notes.append("gallery preset")
    else:
        if "default" in card.configs:
            config = "default"
            notes.append("config 'default' listed")
        elif len(card.configs) == 1:
            config = card.configs[0]
        else:
            with_test = sorted(c for c in card.configs if "test" in card.splits_per_config.get(c, []))
            if with_test:
                config = with_test[0]
                notes.append("config carries a test split")
            else:
                config = sorted(card.configs)[0]
                notes.append("first config lexicographically")
        splits = card.splits_per_config.get(config, [])
        if not splits:
            raise ConfigError(f"{card.repo_id}: config {config!r} has no splits")
        if "test" in splits:
            split = "test"
        elif "validation" in splits:
            split = "validation"
        else:
            preferred = [s for s in ("dev", "eval", "train") if s in splits]
            split = preferred[0] if preferred else splits[0]
            notes.append(f"no test or validation split; using {split!r}")

    if len(card.configs) == 1:
        notes.append("only available subset")
    splits_for_config = card.splits_per_config.get(config, [])
    if split == "test":
        notes.append("canonical test split")
    elif split == "validation" and "test" not in splits_for_config:
        notes.append("no test split, falling back to validation")
    return config, split, "; ".join(notes)


# ---------------------------------------------------------------------------
# Key-mapping inference
# ---------------------------------------------------------------------------

def _present(name: str, feature_names: list[str], rows: list[dict]) -> bool:
    return name in feature_names or any(name in row for row in rows)


def _is_listy(name: str, rows: list[dict]) -> bool:
    values = [row[name] for row in rows if name in row]
    return bool(values) and all(isinstance(v, (list, tuple)) for v in values)


def _label_like(name: str, rows: list[dict]) -> bool:
    values = [row[name] for row in rows if name in row and row[name] is not None]
    if not values:
        return False
    letters = set(string.ascii_uppercase[:8]) | set(string.ascii_lowercase[:8])
    for v in values:
        if isinstance(v, bool):
            return False
        if isinstance(v, int):
            continue
        if isinstance(v, str) and (v.strip() in letters or v.strip().isdigit()):
            continue
        return False
    return True


def infer_key_mapping(features: list[tuple[str, str]], sample_rows: list[dict]) -> KeyMapping:
    """Infer the schema translation from feature names plus real rows."""
    if not sample_rows:
        raise MappingError("cannot infer a key mapping without sample rows")
    feature_names = [name for name, _ in features]

    input_key = next((c for c in INPUT_KEY_CANDIDATES if _present(c, feature_names, sample_rows)), None)
    if input_key is None:
        raise MappingError(f"no input column among {list(INPUT_KEY_CANDIDATES)}; saw {feature_names or sorted(sample_rows[0])}")

    targets_key = next(
        (c for c in TARGETS_KEY_CANDIDATES if _present(c, feature_names, sample_rows) and _is_listy(c, sample_rows)),
        None,
    )
    target_key = None
    if targets_key is None:
        target_key = next((c for c in TARGET_KEY_CANDIDATES if _present(c, feature_names, sample_rows)), None)
        if target_key is None:
            raise MappingError(f"no target column among {list(TARGET_KEY_CANDIDATES)} or list-valued {list(TARGETS_KEY_CANDIDATES)}")

    choices_key = next((c for c in CHOICES_KEY_CANDIDATES if _present(c, feature_names, sample_rows) and _is_listy(c, sample_rows)), None)
    label_key = None
    if choices_key is not None:
        label_key = next(
            (c for c in LABEL_KEY_CANDIDATES if _present(c, feature_names, sample_rows) and _label_like(c, sample_rows)),
            None,
        )
        if label_key is None:
            choices_key = None

    mapping = KeyMapping(
        input_key=input_key,
        target_key=target_key,
        targets_key=targets_key,
        choices_key=choices_key,
        label_key=label_key,
    )
    mapping.validate()
    _validate_mapping_on_rows(mapping, sample_rows)
    return mapping


def _nonempty(value: Any) -> bool:
    if value is None:
        return False
    if isinstance(value, str):
        return bool(value.strip())
    if isinstance(value, (list, tuple)):
        return len(value) > 0 and any(_nonempty(v) for v in value)
    return True


def _validate_mapping_on_rows(mapping: KeyMapping, rows: list[dict]) -> None:
    reference_key = mapping.targets_key or mapping.target_key
    ok_input = sum(1 for r in rows if _nonempty(r.get(mapping.input_key)))
    ok_target = sum(1 for r in rows if _nonempty(r.get(reference_key)))
    if ok_input < NONEMPTY_THRESHOLD * len(rows):
        raise BenchValidationError(f"input column {mapping.input_key!r} empty in too many rows ({ok_input}/{len(rows)})")
    if ok_target < NONEMPTY_THRESHOLD * len(rows):
        raise BenchValidationError(f"no evaluable targets: column {reference_key!r} empty in too many rows ({ok_target}/{len(rows)})")


# ---------------------------------------------------------------------------
# Task-type heuristics
# ---------------------------------------------------------------------------

def infer_task_type(mapping: KeyMapping, rows: list[dict], description: str) -> TaskType:
    if mapping.choices_key:
        return TaskType.MULTIPLE_CHOICE
    reference_key = mapping.targets_key or mapping.target_key
    values = [r.get(reference_key) for r in rows if _nonempty(r.get(reference_key))]
    flat: list[str] = []
    for v in values:
        if isinstance(v, (list, tuple)):
            flat.extend(str(x) for x in v)
        else:
            flat.append(str(v))
    if flat:
        parseable = 0
        for v in flat:
            tail = v.split("####")[-1] if "####" in v else v
            try:
                parse_expr(tail)
                parseable += 1
            except ParseError:
                pass
        if parseable >= NUMERIC_TASK_THRESHOLD * len(flat):
            return TaskType.MATH
    lowered = description.lower()
    if "code" in lowered or "program" in lowered:
        return TaskType.CODE
    return TaskType.GENERATION


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def build_and_validate(
    item: PlanItem,
    gallery: Gallery,
    hub_client: HubClient,
    cache_root: str | Path,
    recorder: Optional[Callable[[dict[str, Any]], None]] = None,
) -> BenchInfo:
    """resolve -> choose config/split -> download -> map keys -> validate.

    A BenchInfo is only emitted for benchmarks that pass every check.
    """
    def staged(stage: str, exc: Exception) -> Exception:
        return type(exc)(f"[{stage}] {exc}")

    try:
        resolved = resolve_benchmark(item, gallery, hub_client, recorder=recorder)
    except (ResolutionError, NotFoundError, TransportError) as exc:
        raise staged("resolve", exc)
    try:
        config, split, rationale = choose_config_split(resolved.card, resolved.gallery_entry)
    except ConfigError as exc:
        raise staged("config", exc)
    try:
        cache_path, row_count = hub_client.download_split(resolved.repo_id, config, split, cache_root)
    except (NotFoundError, TransportError, CorruptDownloadError) as exc:
        raise staged("download", exc)

    rows = load_cached_rows(cache_path, VALIDATION_SAMPLE_SIZE)
    if not rows:
        raise BenchValidationError(f"[validate] {resolved.repo_id}: split {split} has no rows")

    entry = resolved.gallery_entry
    try:
        if entry is not None:
            mapping = entry.key_mapping
            _validate_mapping_on_rows(mapping, rows)
            task_type = entry.task_type
        else:
            mapping = infer_key_mapping(resolved.card.features(config), rows)
            task_type = infer_task_type(mapping, rows, resolved.card.description)
    except (MappingError, BenchValidationError) as exc:
        raise staged("mapping", exc)

    info = BenchInfo(
        benchmark_id=resolved.repo_id,
        source="hub",
        config_name=config,
        split=split,
        key_mapping=mapping,
        task_type=task_type,
        revision=resolved.card.revision,
        cache_path=str(cache_path),
        metrics_override=list(entry.metrics_override) if entry and entry.metrics_override else None,
        rationale=rationale,
    )
    info.validate()
    benchinfo_path = Path(cache_path).parent / "benchinfo.json"
    benchinfo_path.write_bytes(canonical_json_bytes(info.to_dict()) + b"\n")
    return info


# ---------------------------------------------------------------------------
# Row normalization for scoring
# ---------------------------------------------------------------------------

def _letter_for(index: int) -> str:
    return string.ascii_uppercase[index]


def normalize_rows(info: BenchInfo, rows: list[dict]) -> list[dict[str, Any]]:
    """Rows -> {index, input, references, choices_block} via the key mapping.

    Multiple-choice labels accept both the letter and the choice text as
    references.
    """
    mapping = info.key_mapping
    out = []
    for i, row in enumerate(rows):
        input_text = str(row.get(mapping.input_key, "")).strip()
        references: list[str] = []
        choices_block = ""
        if mapping.targets_key:
            raw = row.get(mapping.targets_key) or []
            references = [str(v) for v in raw if _nonempty(v)]
        elif mapping.target_key:
            value = row.get(mapping.target_key)
            if _nonempty(value):
                references = [str(value)]
        if mapping.choices_key and mapping.label_key:
            choices = [str(c) for c in (row.get(mapping.choices_key) or [])]
            label = row.get(mapping.label_key)
            idx: Optional[int] = None
            if isinstance(label, bool):
                idx = None
            elif isinstance(label, int):
                idx = label
            elif isinstance(label, str) and label.strip().isdigit():
                idx = int(label.strip())
            elif isinstance(label, str) and len(label.strip()) == 1 and label.strip().isalpha():
                idx = ord(label.strip().upper()) - ord("A")
            if idx is not None and 0 <= idx < len(choices):
                references = [_letter_for(idx), choices[idx]]
            choices_block = "\n".join(f"{_letter_for(j)}. {c}" for j, c in enumerate(choices))
        out.append({"index": i, "input": input_text, "references": references, "choices_block": choices_block})
    return out
