"""Canonical serialization, hashing, and the evidence trail."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from oneeval.errors import SerializationError
from oneeval.model import (
    BenchInfo,
    BenchmarkPlan,
    CheckpointRecord,
    DecisionKind,
    EvalIntent,
    EvidenceKind,
    EvidenceLog,
    KeyMapping,
    MatchTier,
    MetricOutcome,
    MetricPlan,
    PlanItem,
    PlanSource,
    RunState,
    RunStatus,
    TaskType,
    canonical_json_bytes,
    deserialize_state,
    sanitize_repo_id,
    serialize_state,
    state_hash,
)

GOLDEN_DIR = Path(__file__).parent / "golden"


def populated_state() -> RunState:
    intent = EvalIntent(domains=["math"], explicit_benchmarks=["gsm8k"], constraints={"max_benchmarks": 3}, preferences="quick check")
    plan = BenchmarkPlan(
        items=[
            PlanItem("gsm8k", "openai/gsm8k", PlanSource.USER, 1.0, MatchTier.FORCED, "named explicitly"),
            PlanItem("math-500", "HuggingFaceH4/MATH-500", PlanSource.GALLERY, 0.42, MatchTier.QUALITY, "match"),
        ],
        intent_snapshot=intent,
        budget=3,
    )
    info = BenchInfo(
        benchmark_id="openai/gsm8k",
        source="hub",
        config_name="main",
        split="test",
        key_mapping=KeyMapping(input_key="question", target_key="answer"),
        task_type=TaskType.MATH,
        revision="abc1234",
        cache_path="/tmp/cache/gsm8k/test.jsonl",
        rationale="canonical test split",
    )
    return RunState(
        run_id="run-x",
        request_text="evaluate math",
        step_index=5,
        intent=intent,
        plan=plan,
        bench_infos=[info],
        checkpoints=[CheckpointRecord("plan-1", 4, "0" * 64, DecisionKind.APPROVED)],
        token_usage=123,
        started_at="2024-05-01T10:00:00Z",
    )


class TestSerialization:
    def test_round_trip_identity_fresh(self):
        state = RunState(run_id="fresh")
        assert deserialize_state(serialize_state(state)) == state

    def test_round_trip_identity_populated(self):
        state = populated_state()
        assert deserialize_state(serialize_state(state)) == state

    def test_canonicalization_ignores_map_insertion_order(self):
        a = RunState(run_id="r", started_at="t")
        b = RunState(run_id="r", started_at="t")
        a.intent = EvalIntent(domains=["math"], constraints={"x": 1, "y": 2})
        b.intent = EvalIntent(domains=["math"], constraints={"y": 2, "x": 1})
        a.step_index = b.step_index = 1
        assert serialize_state(a) == serialize_state(b)

    def test_nan_rejected(self):
        state = populated_state()
        state.plan.items[1].relevance_score = float("nan")
        with pytest.raises(SerializationError):
            serialize_state(state)

    def test_canonical_bytes_are_compact_and_sorted(self):
        raw = canonical_json_bytes({"b": 1, "a": [1, 2]})
        assert raw == b'{"a":[1,2],"b":1}'


class TestHashing:
    def test_hash_stable_across_round_trip(self):
        state = populated_state()
        assert state_hash(state) == state_hash(deserialize_state(serialize_state(state)))

    def test_hash_differs_on_content_change(self):
        a = populated_state()
        b = populated_state()
        b.token_usage += 1
        assert state_hash(a) != state_hash(b)

    def test_hash_ignores_timestamps(self):
        a = populated_state()
        b = populated_state()
        b.started_at = "2030-12-31T23:59:59Z"
        assert state_hash(a) == state_hash(b)

    def test_empty_state_matches_pinned_golden(self):
        golden = (GOLDEN_DIR / "empty_state_hash.txt").read_text().strip()
        state = RunState(run_id="fresh", started_at="2024-01-01T00:00:00Z")
        assert state_hash(state) == golden
        assert len(golden) == 64 and all(c in "0123456789abcdef" for c in golden)


class TestInvariants:
    def test_artifact_absent_before_its_step(self):
        state = RunState(run_id="r", step_index=2)
        state.plan = populated_state().plan
        with pytest.raises(ValueError):
            state.validate()

    def test_key_mapping_exactly_one_target(self):
        with pytest.raises(ValueError):
            KeyMapping(input_key="q", target_key="a", targets_key="many").validate()
        with pytest.raises(ValueError):
            KeyMapping(input_key="q").validate()

    def test_multiple_choice_needs_both_keys(self):
        with pytest.raises(ValueError):
            KeyMapping(input_key="q", target_key="a", choices_key="choices").validate()

    def test_user_items_are_forced(self):
        item = PlanItem("x", None, PlanSource.USER, 0.5, MatchTier.QUALITY)
        with pytest.raises(ValueError):
            item.validate()

    def test_plan_budget(self):
        state = populated_state()
        state.plan.budget = 1
        with pytest.raises(ValueError):
            state.plan.validate()

    def test_metric_plan_primary(self):
        plan = MetricPlan("b", [("extraction_rate", 2), ("math_verify", 1)], "fallback")
        assert plan.primary_metric() == "math_verify"


class TestEvidenceLog:
    def test_append_only_and_ordered(self, tmp_path):
        log = EvidenceLog(tmp_path / "evidence.jsonl")
        for step in range(5):
            log.append("run-x", step, EvidenceKind.DECISION, {"step": step}, "0" * 64)
        records = log.records()
        assert [r.index for r in records] == [0, 1, 2, 3, 4]
        reloaded = EvidenceLog(tmp_path / "evidence.jsonl")
        assert [r.index for r in reloaded.records()] == [0, 1, 2, 3, 4]

    def test_pagination(self, tmp_path):
        log = EvidenceLog(tmp_path / "evidence.jsonl")
        for i in range(4):
            log.append("run-x", 1, EvidenceKind.METRIC, {"i": i}, "0" * 64)
        assert [r.index for r in log.after(1)] == [2, 3]

    def test_jsonl_one_record_per_line(self, tmp_path):
        path = tmp_path / "evidence.jsonl"
        log = EvidenceLog(path)
        log.append("run-x", 0, EvidenceKind.RETRIEVAL, {"q": "x"}, "0" * 64)
        log.append("run-x", 0, EvidenceKind.RETRIEVAL, {"q": "y"}, "0" * 64)
        lines = [json.loads(line) for line in path.read_text().splitlines()]
        assert len(lines) == 2 and lines[1]["payload"]["q"] == "y"


def test_sanitize_repo_id():
    assert sanitize_repo_id("openai/gsm8k") == "openai__gsm8k"


# -- property: round-trip and hash determinism over generated states --------

from hypothesis import given, settings, strategies as st  # noqa: E402

_name = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789-_/", min_size=1, max_size=24)
_score = st.floats(0, 1, allow_nan=False)


def _items(draw_source):
    return st.builds(
        PlanItem,
        display_name=_name,
        canonical_id=st.one_of(st.none(), _name),
        source=st.just(draw_source),
        relevance_score=_score,
        match_tier=st.just(MatchTier.QUALITY if draw_source is PlanSource.GALLERY else MatchTier.FORCED),
        justification=st.text(max_size=40),
        category_tags=st.lists(st.sampled_from(["math", "text", "code"]), max_size=3),
    )


_state_strategy = st.builds(
    RunState,
    run_id=_name,
    request_text=st.text(max_size=60),
    step_index=st.just(3),
    status=st.sampled_from(list(RunStatus)),
    intent=st.builds(
        EvalIntent,
        domains=st.lists(st.sampled_from(["math", "text", "reasoning"]), min_size=1, max_size=3),
        explicit_benchmarks=st.lists(_name, max_size=2),
        constraints=st.dictionaries(st.sampled_from(["max_benchmarks", "language"]), st.integers(1, 9), max_size=2),
        preferences=st.text(max_size=30),
    ),
    plan=st.builds(
        BenchmarkPlan,
        items=st.lists(_items(PlanSource.GALLERY), min_size=1, max_size=4),
        intent_snapshot=st.builds(EvalIntent, domains=st.just(["math"])),
        budget=st.integers(4, 8),
    ),
    token_usage=st.integers(0, 10**6),
    started_at=st.just("2024-01-01T00:00:00Z"),
)


@given(_state_strategy)
@settings(max_examples=120, deadline=None)
def test_round_trip_property(state):
    assert deserialize_state(serialize_state(state)) == state
    assert state_hash(state) == state_hash(deserialize_state(serialize_state(state)))
