"""Hierarchical resolution, config/split policy, key mapping, validation."""

from __future__ import annotations

import json

import pytest
from hypothesis import given, settings, strategies as st

from oneeval.errors import BenchValidationError, ConfigError, MappingError, ResolutionError
from oneeval.gallery import load_gallery
from oneeval.hub import DatasetCard, HubClient, load_cached_rows
from oneeval.model import MatchTier, PlanItem, PlanSource, TaskType
from oneeval.resolve import (
    build_and_validate,
    choose_config_split,
    infer_key_mapping,
    normalize_rows,
    resolve_benchmark,
)


def item(name, canonical_id=None, source=PlanSource.GALLERY):
    return PlanItem(
        display_name=name,
        canonical_id=canonical_id,
        source=source,
        relevance_score=0.9 if source is not PlanSource.USER else 1.0,
        match_tier=MatchTier.FORCED if source is PlanSource.USER else MatchTier.QUALITY,
    )


@pytest.fixture()
def gallery(gallery_path):
    return load_gallery(gallery_path)


@pytest.fixture()
def hub(hub_fixtures):
    return HubClient(offline_dir=hub_fixtures)


class TestResolveBenchmark:
    def test_gallery_tier(self, gallery, hub):
        events = []
        resolved = resolve_benchmark(item("mmlu"), gallery, hub, recorder=events.append)
        assert resolved.repo_id == "cais/mmlu"
        assert resolved.provenance == "gallery"
        assert events[0]["tier"] == "gallery"

    def test_direct_tier(self, gallery, hub):
        resolved = resolve_benchmark(item("weird/opaque-columns"), gallery, hub)
        assert resolved.provenance == "direct"

    def test_search_tier_suffix_cue(self, gallery_path, hub, tmp_path):
        # remove math-500 from the gallery so the search tier must fire
        raw = json.loads(gallery_path.read_text(encoding="utf-8"))
        trimmed = [e for e in raw["entries"] if e["id"] != "math-500"]
        trimmed_path = tmp_path / "gallery.json"
        trimmed_path.write_text(json.dumps({"entries": trimmed}))
        small_gallery = load_gallery(trimmed_path)
        resolved = resolve_benchmark(item("math-500"), small_gallery, hub)
        assert resolved.repo_id == "HuggingFaceH4/MATH-500"
        assert resolved.provenance == "search"

    def test_unresolvable(self, gallery, tmp_path):
        fixture_dir = tmp_path / "hub"
        (fixture_dir / "cards").mkdir(parents=True)
        (fixture_dir / "search").mkdir(parents=True)
        empty_hub = HubClient(offline_dir=fixture_dir)
        with pytest.raises(ResolutionError):
            resolve_benchmark(item("ghost-benchmark"), gallery, empty_hub)


class TestChooseConfigSplit:
    def card(self, configs, splits, repo="org/x"):
        return DatasetCard(repo_id=repo, configs=configs, splits_per_config=splits, features_per_config={})

    def test_gsm8k_shape(self):
        card = self.card(["main", "socratic"], {"main": ["train", "test"], "socratic": ["train", "test"]})
        config, split, _ = choose_config_split(card)
        assert (config, split) == ("main", "test")

    def test_validation_fallback_records_rationale(self):
        card = self.card(["generation"], {"generation": ["validation"]})
        config, split, rationale = choose_config_split(card)
        assert split == "validation"
        assert "no test split" in rationale

    def test_sole_config_rationale(self):
        card = self.card(["default"], {"default": ["test"]})
        config, split, rationale = choose_config_split(card)
        assert (config, split) == ("default", "test")
        assert "only available subset" in rationale

    def test_gallery_preset_overrides(self, gallery, hub):
        card = hub.fetch_dataset_card("truthful_qa")
        entry = gallery.lookup("truthful_qa")
        config, split, rationale = choose_config_split(card, entry)
        assert (config, split) == ("generation", "validation")
        assert "gallery preset" in rationale and "no test split" in rationale

    def test_no_splits_is_config_error(self):
        with pytest.raises(ConfigError):
            choose_config_split(self.card(["a"], {"a": []}))

    @given(
        st.dictionaries(
            st.sampled_from(["default", "main", "alpha", "beta"]),
            st.lists(st.sampled_from(["train", "test", "validation", "dev"]), min_size=1, max_size=4, unique=True),
            min_size=1,
            max_size=4,
        )
    )
    @settings(max_examples=200, deadline=None)
    def test_split_policy_property(self, splits):
        card = self.card(list(splits), splits)
        config, split, _ = choose_config_split(card)
        available = splits[config]
        if "test" in available:
            assert split == "test"
        elif "validation" in available:
            assert split == "validation"
        else:
            assert split in available


class TestInferKeyMapping:
    def test_gsm8k_shape(self):
        rows = [{"question": "q?", "answer": "a"}] * 3
        mapping = infer_key_mapping([("question", "string"), ("answer", "string")], rows)
        assert mapping.input_key == "question" and mapping.target_key == "answer"
        assert mapping.targets_key is None and mapping.choices_key is None

    def test_truthful_qa_list_targets(self):
        rows = [{"question": "q?", "correct_answers": ["a", "b"], "incorrect_answers": ["c"]}] * 3
        mapping = infer_key_mapping(
            [("question", "string"), ("correct_answers", "list"), ("incorrect_answers", "list")], rows
        )
        assert mapping.targets_key == "correct_answers" and mapping.target_key is None

    def test_multiple_choice_detection(self):
        rows = [{"question": "q?", "choices": ["x", "y"], "answer": 1}] * 3
        mapping = infer_key_mapping([("question", "string"), ("choices", "list"), ("answer", "int")], rows)
        assert mapping.choices_key == "choices" and mapping.label_key == "answer"

    def test_opaque_columns_fail(self):
        rows = [{"foo": "x", "bar": "y"}] * 3
        with pytest.raises(MappingError):
            infer_key_mapping([("foo", "string"), ("bar", "string")], rows)

    def test_mostly_empty_targets_fail_validation(self):
        rows = [{"question": "q?", "answer": ""}] * 10
        with pytest.raises(BenchValidationError) as err:
            infer_key_mapping([("question", "string"), ("answer", "string")], rows)
        assert "no evaluable targets" in str(err.value)


class TestBuildAndValidate:
    def test_gsm8k_end_to_end(self, gallery, hub, tmp_path):
        info = build_and_validate(item("gsm8k"), gallery, hub, tmp_path)
        assert info.benchmark_id == "openai/gsm8k"
        assert (info.config_name, info.split) == ("main", "test")
        assert info.key_mapping.input_key == "question" and info.key_mapping.target_key == "answer"
        assert info.task_type is TaskType.MATH
        assert info.cache_path and load_cached_rows(info.cache_path)

    def test_gallery_fields_verbatim(self, gallery, hub, tmp_path):
        info = build_and_validate(item("truthful_qa"), gallery, hub, tmp_path)
        entry = gallery.lookup("truthful_qa")
        assert info.key_mapping == entry.key_mapping
        assert info.config_name == entry.hf_config and info.split == entry.eval_split
        assert info.task_type == entry.task_type

    def test_empty_targets_rejected(self, gallery, hub, tmp_path):
        fixture_dir = tmp_path / "hubfx"
        (fixture_dir / "cards").mkdir(parents=True)
        (fixture_dir / "cards" / "org__empty.json").write_text(json.dumps({
            "repo_id": "org/empty", "configs": ["default"], "splits_per_config": {"default": ["test"]},
            "features_per_config": {"default": [["question", "string"], ["answer", "string"]]}, "revision": "r1",
        }))
        rows_dir = fixture_dir / "rows" / "org__empty" / "default"
        rows_dir.mkdir(parents=True)
        rows_dir.joinpath("test.jsonl").write_text("\n".join(json.dumps({"question": f"q{i}", "answer": ""}) for i in range(5)))
        bad_hub = HubClient(offline_dir=fixture_dir)
        with pytest.raises(BenchValidationError) as err:
            build_and_validate(item("org/empty"), gallery, bad_hub, tmp_path / "cache")
        assert "no evaluable targets" in str(err.value)

    def test_warm_cache_byte_identical(self, gallery, hub, tmp_path):
        from pathlib import Path

        first = build_and_validate(item("gsm8k"), gallery, hub, tmp_path)
        path = Path(first.cache_path).parent / "benchinfo.json"
        first_bytes = path.read_bytes()
        second = build_and_validate(item("gsm8k"), gallery, hub, tmp_path)
        assert path.read_bytes() == first_bytes
        assert second.to_dict() == first.to_dict()

    def test_gallery_tier_issues_no_search(self, gallery, hub, tmp_path):
        searches = []
        original = hub.search_datasets
        hub.search_datasets = lambda *a, **k: searches.append(a) or original(*a, **k)
        build_and_validate(item("mmlu"), gallery, hub, tmp_path)
        assert searches == []


class TestNormalizeRows:
    def test_generation_rows(self, gallery, hub, tmp_path):
        info = build_and_validate(item("gsm8k"), gallery, hub, tmp_path)
        rows = load_cached_rows(info.cache_path, 3)
        normalized = normalize_rows(info, rows)
        assert normalized[0]["input"].startswith("Tom has 13 marbles")
        assert normalized[0]["references"] and "#### 42" in normalized[0]["references"][0]

    def test_multiple_choice_rows(self, gallery, hub, tmp_path):
        info = build_and_validate(item("mmlu"), gallery, hub, tmp_path)
        rows = load_cached_rows(info.cache_path, 2)
        normalized = normalize_rows(info, rows)
        first = normalized[0]
        assert first["references"] == ["B", "Mars"]  # letter and choice text
        assert "A. Venus" in first["choices_block"]

    def test_list_targets(self, gallery, hub, tmp_path):
        info = build_and_validate(item("truthful_qa"), gallery, hub, tmp_path)
        rows = load_cached_rows(info.cache_path, 1)
        normalized = normalize_rows(info, rows)
        assert len(normalized[0]["references"]) >= 2
