"""Shared domain types, canonical state serialization, and content hashing.

Every artifact the pipeline persists (run state snapshots, evidence records,
benchmark configurations) round-trips through the canonical JSON encoding in
this module, so hashes are stable across processes and platforms.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Optional

from .errors import SerializationError

# Keys that hold wall-clock timestamps.  They are serialized with the state
# but stripped before hashing so rollback replay reproduces identical hashes.
TIMESTAMP_KEYS = frozenset({"timestamp", "started_at", "finished_at", "retrieved_at"})


class TaskType(str, Enum):
    GENERATION = "generation"
    MULTIPLE_CHOICE = "multiple_choice"
    MATH = "math"
    CODE = "code"
    OPEN_QA = "open_qa"


class PlanSource(str, Enum):
    GALLERY = "gallery"
    HUB = "hub"
    USER = "user"


class MatchTier(str, Enum):
    QUALITY = "quality"
    MARGINAL = "marginal"
    FORCED = "forced"


class RunStatus(str, Enum):
    RUNNING = "running"
    AWAITING_DECISION = "awaiting_decision"
    FAILED = "failed"
    COMPLETED = "completed"
    ROLLED_BACK = "rolled_back"


class DecisionKind(str, Enum):
    PENDING = "pending"
    APPROVED = "approved"
    EDITED = "edited"
    REFINED = "refined"
    ROLLED_BACK = "rolled_back"


class EvidenceKind(str, Enum):
    LLM_CALL = "llm_call"
    RETRIEVAL = "retrieval"
    RESOLUTION = "resolution"
    DOWNLOAD = "download"
    PREDICTION = "prediction"
    METRIC = "metric"
    DECISION = "decision"


def utc_now() -> str:
    """RFC 3339 UTC timestamp with second precision."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class EvalIntent:
    """Structured evaluation request extracted from free-form text."""

    domains: list[str] = field(default_factory=list)
    explicit_benchmarks: list[str] = field(default_factory=list)
    constraints: dict[str, Any] = field(default_factory=dict)
    preferences: str = ""

    def validate(self) -> None:
        for name in self.explicit_benchmarks:
            if not isinstance(name, str) or not name.strip() or name != name.strip():
                raise ValueError(f"explicit benchmark entries must be non-empty trimmed strings: {name!r}")
        budget = self.constraints.get("max_benchmarks")
        if budget is not None and int(budget) < 1:
            raise ValueError("constraint max_benchmarks must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        return {
            "domains": list(self.domains),
            "explicit_benchmarks": list(self.explicit_benchmarks),
            "constraints": dict(self.constraints),
            "preferences": self.preferences,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EvalIntent":
        return cls(
            domains=list(d.get("domains", [])),
            explicit_benchmarks=list(d.get("explicit_benchmarks", [])),
            constraints=dict(d.get("constraints", {})),
            preferences=d.get("preferences", ""),
        )


@dataclass
class PlanItem:
    """One candidate benchmark inside a plan, with provenance and justification."""

    display_name: str
    canonical_id: Optional[str]
    source: PlanSource
    relevance_score: float
    match_tier: MatchTier
    justification: str = ""
    category_tags: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if self.source is PlanSource.USER and self.match_tier is not MatchTier.FORCED:
            raise ValueError("user-sourced items must be forced")
        if not 0.0 <= self.relevance_score <= 1.0:
            raise ValueError(f"relevance_score out of [0,1]: {self.relevance_score}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "display_name": self.display_name,
            "canonical_id": self.canonical_id,
            "source": self.source.value,
            "relevance_score": self.relevance_score,
            "match_tier": self.match_tier.value,
            "justification": self.justification,
            "category_tags": list(self.category_tags),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PlanItem":
        return cls(
            display_name=d["display_name"],
            canonical_id=d.get("canonical_id"),
            source=PlanSource(d["source"]),
            relevance_score=float(d["relevance_score"]),
            match_tier=MatchTier(d["match_tier"]),
            justification=d.get("justification", ""),
            category_tags=list(d.get("category_tags", [])),
        )


@dataclass
class BenchmarkPlan:
    """Ordered, budget-bounded benchmark selection approved at the plan checkpoint."""

    items: list[PlanItem]
    intent_snapshot: EvalIntent
    budget: int

    def validate(self) -> None:
        if len(self.items) > self.budget:
            raise ValueError(f"plan has {len(self.items)} items over budget {self.budget}")
        resolved = [i.canonical_id for i in self.items if i.canonical_id]
        if len(resolved) != len(set(resolved)):
            raise ValueError("resolved canonical ids must be pairwise distinct")
        for item in self.items:
            item.validate()

    def to_dict(self) -> dict[str, Any]:
        return {
            "items": [i.to_dict() for i in self.items],
            "intent_snapshot": self.intent_snapshot.to_dict(),
            "budget": self.budget,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BenchmarkPlan":
        return cls(
            items=[PlanItem.from_dict(i) for i in d["items"]],
            intent_snapshot=EvalIntent.from_dict(d["intent_snapshot"]),
            budget=int(d["budget"]),
        )


@dataclass
class KeyMapping:
    """Column-name translation from a dataset's native schema to input/target(s)."""

    input_key: str
    target_key: Optional[str] = None
    targets_key: Optional[str] = None
    choices_key: Optional[str] = None
    label_key: Optional[str] = None

    def validate(self) -> None:
        if bool(self.target_key) == bool(self.targets_key):
            raise ValueError("exactly one of target_key/targets_key must be set")
        if bool(self.choices_key) != bool(self.label_key):
            raise ValueError("multiple-choice mapping requires both choices_key and label_key")
        if not self.input_key:
            raise ValueError("input_key must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "input_key": self.input_key,
            "target_key": self.target_key,
            "targets_key": self.targets_key,
            "choices_key": self.choices_key,
            "label_key": self.label_key,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "KeyMapping":
        return cls(
            input_key=d["input_key"],
            target_key=d.get("target_key"),
            targets_key=d.get("targets_key"),
            choices_key=d.get("choices_key"),
            label_key=d.get("label_key"),
        )


@dataclass
class BenchInfo:
    """Executable per-benchmark configuration produced by resolution."""

    benchmark_id: str
    source: str  # "hub" | "local"
    config_name: str
    split: str
    key_mapping: KeyMapping
    task_type: TaskType
    revision: str = "unversioned"
    cache_path: Optional[str] = None
    metrics_override: Optional[list[str]] = None
    rationale: str = ""

    def validate(self) -> None:
        if not self.split:
            raise ValueError("split must be non-empty")
        if self.source not in ("hub", "local"):
            raise ValueError(f"unknown source {self.source!r}")
        self.key_mapping.validate()

    def to_dict(self) -> dict[str, Any]:
        return {
            "benchmark_id": self.benchmark_id,
            "source": self.source,
            "config_name": self.config_name,
            "split": self.split,
            "key_mapping": self.key_mapping.to_dict(),
            "task_type": self.task_type.value,
            "revision": self.revision,
            "cache_path": self.cache_path,
            "metrics_override": list(self.metrics_override) if self.metrics_override is not None else None,
            "rationale": self.rationale,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BenchInfo":
        override = d.get("metrics_override")
        return cls(
            benchmark_id=d["benchmark_id"],
            source=d["source"],
            config_name=d["config_name"],
            split=d["split"],
            key_mapping=KeyMapping.from_dict(d["key_mapping"]),
            task_type=TaskType(d["task_type"]),
            revision=d.get("revision", "unversioned"),
            cache_path=d.get("cache_path"),
            metrics_override=list(override) if override is not None else None,
            rationale=d.get("rationale", ""),
        )


@dataclass
class MetricPlan:
    """Ordered metric suite chosen for one benchmark."""

    benchmark_id: str
    selected: list[tuple[str, int]]  # (metric name, priority), lower = more important
    provenance: str  # "override" | "llm" | "fallback"

    def validate(self) -> None:
        if not self.selected:
            raise ValueError("metric plan must select at least one metric")
        if self.provenance not in ("override", "llm", "fallback"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def primary_metric(self) -> str:
        return min(self.selected, key=lambda pair: pair[1])[0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "benchmark_id": self.benchmark_id,
            "selected": [[name, prio] for name, prio in self.selected],
            "provenance": self.provenance,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MetricPlan":
        return cls(
            benchmark_id=d["benchmark_id"],
            selected=[(name, int(prio)) for name, prio in d["selected"]],
            provenance=d["provenance"],
        )


@dataclass
class MetricOutcome:
    """Aggregate plus optional per-sample detail for one metric on one benchmark."""

    metric: str
    aggregate: float
    priority: int
    per_sample: Optional[list[tuple[int, float, str]]] = None
    error: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "metric": self.metric,
            "aggregate": self.aggregate,
            "priority": self.priority,
            "per_sample": [[i, v, detail] for i, v, detail in self.per_sample] if self.per_sample is not None else None,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "MetricOutcome":
        per_sample = d.get("per_sample")
        return cls(
            metric=d["metric"],
            aggregate=float(d["aggregate"]),
            priority=int(d["priority"]),
            per_sample=[(int(i), float(v), detail) for i, v, detail in per_sample] if per_sample is not None else None,
            error=d.get("error"),
        )


@dataclass
class SampleRecord:
    """One normalized, scored sample kept for case-level inspection."""

    index: int
    input: str
    prediction: str
    references: list[str]
    pred_error: bool = False
    pred_tokens: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "input": self.input,
            "prediction": self.prediction,
            "references": list(self.references),
            "pred_error": self.pred_error,
            "pred_tokens": self.pred_tokens,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SampleRecord":
        return cls(
            index=int(d["index"]),
            input=d["input"],
            prediction=d["prediction"],
            references=list(d["references"]),
            pred_error=bool(d.get("pred_error", False)),
            pred_tokens=int(d.get("pred_tokens", 0)),
        )


@dataclass
class BenchmarkResult:
    """Scored outcome of one benchmark within a run."""

    benchmark_id: str
    samples: list[SampleRecord]
    outcomes: list[MetricOutcome]
    failed: bool = False
    error: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "benchmark_id": self.benchmark_id,
            "samples": [s.to_dict() for s in self.samples],
            "outcomes": [o.to_dict() for o in self.outcomes],
            "failed": self.failed,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "BenchmarkResult":
        return cls(
            benchmark_id=d["benchmark_id"],
            samples=[SampleRecord.from_dict(s) for s in d["samples"]],
            outcomes=[MetricOutcome.from_dict(o) for o in d["outcomes"]],
            failed=bool(d.get("failed", False)),
            error=d.get("error"),
        )


@dataclass
class CheckpointRecord:
    """A decision point: snapshot hash plus the human (or auto) verdict."""

    checkpoint_id: str
    step_index: int
    snapshot_hash: str
    decision: DecisionKind = DecisionKind.PENDING
    user_note: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "checkpoint_id": self.checkpoint_id,
            "step_index": self.step_index,
            "snapshot_hash": self.snapshot_hash,
            "decision": self.decision.value,
            "user_note": self.user_note,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "CheckpointRecord":
        return cls(
            checkpoint_id=d["checkpoint_id"],
            step_index=int(d["step_index"]),
            snapshot_hash=d["snapshot_hash"],
            decision=DecisionKind(d["decision"]),
            user_note=d.get("user_note"),
        )


@dataclass
class EvidenceRecord:
    """Append-only audit event. Records are totally ordered per run by index."""

    index: int
    run_id: str
    step_index: int
    timestamp: str
    kind: EvidenceKind
    payload: dict[str, Any]
    state_hash: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "index": self.index,
            "run_id": self.run_id,
            "step_index": self.step_index,
            "timestamp": self.timestamp,
            "kind": self.kind.value,
            "payload": self.payload,
            "state_hash": self.state_hash,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "EvidenceRecord":
        return cls(
            index=int(d["index"]),
            run_id=d["run_id"],
            step_index=int(d["step_index"]),
            timestamp=d["timestamp"],
            kind=EvidenceKind(d["kind"]),
            payload=dict(d["payload"]),
            state_hash=d["state_hash"],
        )


@dataclass
class RunState:
    """Checkpointed pipeline state. Mutated only by the single-writer orchestrator."""

    run_id: str
    request_text: str = ""
    model_id: str = "unknown"
    step_index: int = 0
    status: RunStatus = RunStatus.RUNNING
    intent: Optional[EvalIntent] = None
    plan: Optional[BenchmarkPlan] = None
    bench_infos: Optional[list[BenchInfo]] = None
    metric_plans: Optional[list[MetricPlan]] = None
    results: Optional[list[BenchmarkResult]] = None
    report_ref: Optional[str] = None
    checkpoints: list[CheckpointRecord] = field(default_factory=list)
    token_usage: int = 0
    failure: Optional[str] = None
    started_at: str = field(default_factory=utc_now)

    # Stage artifacts keyed by the first step index at which they may exist.
    _ARTIFACT_STEPS = (("intent", 1), ("plan", 3), ("bench_infos", 5), ("metric_plans", 7), ("results", 7), ("report_ref", 8))

    def validate(self) -> None:
        if not 0 <= self.step_index <= 8:
            raise ValueError(f"step_index out of range: {self.step_index}")
        for name, step in self._ARTIFACT_STEPS:
            if getattr(self, name) is not None and self.step_index < step:
                raise ValueError(f"artifact {name} present before step {step}")
        if self.token_usage < 0:
            raise ValueError("token_usage must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "run_id": self.run_id,
            "request_text": self.request_text,
            "model_id": self.model_id,
            "step_index": self.step_index,
            "status": self.status.value,
            "intent": self.intent.to_dict() if self.intent else None,
            "plan": self.plan.to_dict() if self.plan else None,
            "bench_infos": [b.to_dict() for b in self.bench_infos] if self.bench_infos is not None else None,
            "metric_plans": [m.to_dict() for m in self.metric_plans] if self.metric_plans is not None else None,
            "results": [r.to_dict() for r in self.results] if self.results is not None else None,
            "report_ref": self.report_ref,
            "checkpoints": [c.to_dict() for c in self.checkpoints],
            "token_usage": self.token_usage,
            "failure": self.failure,
            "started_at": self.started_at,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RunState":
        return cls(
            run_id=d["run_id"],
            request_text=d.get("request_text", ""),
            model_id=d.get("model_id", "unknown"),
            step_index=int(d["step_index"]),
            status=RunStatus(d["status"]),
            intent=EvalIntent.from_dict(d["intent"]) if d.get("intent") else None,
            plan=BenchmarkPlan.from_dict(d["plan"]) if d.get("plan") else None,
            bench_infos=[BenchInfo.from_dict(b) for b in d["bench_infos"]] if d.get("bench_infos") is not None else None,
            metric_plans=[MetricPlan.from_dict(m) for m in d["metric_plans"]] if d.get("metric_plans") is not None else None,
            results=[BenchmarkResult.from_dict(r) for r in d["results"]] if d.get("results") is not None else None,
            report_ref=d.get("report_ref"),
            checkpoints=[CheckpointRecord.from_dict(c) for c in d.get("checkpoints", [])],
            token_usage=int(d.get("token_usage", 0)),
            failure=d.get("failure"),
            started_at=d.get("started_at", ""),
        )


# ---------------------------------------------------------------------------
# Canonical serialization and hashing
# ---------------------------------------------------------------------------

def canonical_json_bytes(value: Any) -> bytes:
    """Key-sorted, minimal-whitespace UTF-8 JSON; rejects NaN/Infinity."""
    try:
        return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False).encode("utf-8")
    except (ValueError, TypeError) as exc:
        raise SerializationError(str(exc)) from exc


def serialize_state(state: RunState) -> bytes:
    return canonical_json_bytes(state.to_dict())


def deserialize_state(raw: bytes | str) -> RunState:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    return RunState.from_dict(json.loads(raw))


def _strip_timestamps(value: Any) -> Any:
    if isinstance(value, dict):
        return {k: _strip_timestamps(v) for k, v in value.items() if k not in TIMESTAMP_KEYS}
    if isinstance(value, list):
        return [_strip_timestamps(v) for v in value]
    return value


def state_hash(state: RunState) -> str:
    """SHA-256 of the canonical serialization with timestamp fields excluded."""
    return hashlib.sha256(canonical_json_bytes(_strip_timestamps(state.to_dict()))).hexdigest()


def content_hash(value: Any) -> str:
    """SHA-256 of an arbitrary JSON-serializable value, timestamps excluded."""
    return hashlib.sha256(canonical_json_bytes(_strip_timestamps(value))).hexdigest()


# ---------------------------------------------------------------------------
# Run directory layout and the evidence trail
# ---------------------------------------------------------------------------

class RunPaths:
    """Flat-file layout for one run: snapshots, evidence, benchinfo, report."""

    def __init__(self, root: Path | str, run_id: str):
        self.run_dir = Path(root) / run_id

    def state_path(self, step: int) -> Path:
        return self.run_dir / f"state-{step}.json"

    @property
    def evidence_path(self) -> Path:
        return self.run_dir / "evidence.jsonl"

    def snapshot_path(self, checkpoint_id: str) -> Path:
        return self.run_dir / "snapshots" / f"{checkpoint_id}.json"

    def benchinfo_path(self, benchmark_id: str) -> Path:
        return self.run_dir / "benchinfo" / f"{sanitize_repo_id(benchmark_id)}.json"

    @property
    def report_json_path(self) -> Path:
        return self.run_dir / "report.json"

    @property
    def report_md_path(self) -> Path:
        return self.run_dir / "report.md"

    @property
    def report_csv_path(self) -> Path:
        return self.run_dir / "report.csv"

    @property
    def figures_dir(self) -> Path:
        return self.run_dir / "figures"

    def ensure(self) -> "RunPaths":
        (self.run_dir / "snapshots").mkdir(parents=True, exist_ok=True)
        (self.run_dir / "benchinfo").mkdir(parents=True, exist_ok=True)
        return self


def sanitize_repo_id(repo_id: str) -> str:
    return repo_id.replace("/", "__")


class EvidenceLog:
    """Append-only JSONL evidence trail with strictly increasing indices."""

    def __init__(self, path: Path):
        self.path = path
        self._lock = threading.Lock()
        self._records: list[EvidenceRecord] = []
        if path.exists():
            with path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        self._records.append(EvidenceRecord.from_dict(json.loads(line)))

    def __len__(self) -> int:
        return len(self._records)

    def append(self, run_id: str, step_index: int, kind: EvidenceKind, payload: dict[str, Any], state_hash_value: str) -> EvidenceRecord:
        with self._lock:
            record = EvidenceRecord(
                index=len(self._records),
                run_id=run_id,
                step_index=step_index,
                timestamp=utc_now(),
                kind=kind,
                payload=payload,
                state_hash=state_hash_value,
            )
            self._records.append(record)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(canonical_json_bytes(record.to_dict()).decode("utf-8") + "\n")
            return record

    def records(self) -> list[EvidenceRecord]:
        with self._lock:
            return list(self._records)

    def after(self, index: int) -> list[EvidenceRecord]:
        with self._lock:
            return [r for r in self._records if r.index > index]

    def of_kind(self, kind: EvidenceKind) -> list[EvidenceRecord]:
        with self._lock:
            return [r for r in self._records if r.kind is kind]
