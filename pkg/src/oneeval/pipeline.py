"""Eight-step evaluation pipeline with checkpoints, rollback, and evidence.

Steps: 1 intent, 2 retrieval, 3 plan selection, 4 plan checkpoint,
5 resolution + acquisition, 6 config checkpoint, 7 predictions + metric
recommendation + scoring, 8 report + final checkpoint.  Checkpoints pause
the run for a human decision unless auto-approve is on; every checkpoint
snapshot can be rolled back to and replayed.
"""

from __future__ import annotations

import logging
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional

from .errors import (
    BenchValidationError,
    ConfigError,
    CorruptDownloadError,
    IntentError,
    MappingError,
    NotFoundError,
    OneEvalError,
    PlanError,
    PredictionError,
    RecommendationError,
    ResolutionError,
    RetrievalBackendError,
    StateError,
    TransportError,
)
from .gallery import Gallery
from .hub import HubClient, load_cached_rows
from .llm import Prediction, generate_predictions
from .metrics import analyze_failures, default_registry, recommend_metrics, run_metrics
from .metrics.registry import MetricRegistry
from .model import (
    BenchInfo,
    BenchmarkPlan,
    BenchmarkResult,
    CheckpointRecord,
    DecisionKind,
    EvalIntent,
    EvidenceKind,
    EvidenceLog,
    KeyMapping,
    MatchTier,
    MetricPlan,
    PlanItem,
    PlanSource,
    RunPaths,
    RunState,
    RunStatus,
    SampleRecord,
    TaskType,
    canonical_json_bytes,
    deserialize_state,
    serialize_state,
    state_hash,
)
from .nl2bench import (
    RetrievalConfig,
    constraint_int,
    build_tfidf_index,
    candidates_to_items,
    fallback_search,
    partition,
    retrieval_query,
    score_embedding,
    score_tfidf,
    select_plan,
    structure_intent,
)
from .report import build_bundle, failed_samples_by_benchmark, render, render_figures, write_csv
from .resolve import build_and_validate, normalize_rows
from . import resolve as resolve_mod

logger = logging.getLogger(__name__)

DEFAULT_MAX_SAMPLES = 50
DEFAULT_PARALLELISM = 4
PLAN_CHECKPOINT_STEP = 4
CONFIG_CHECKPOINT_STEP = 6
FINAL_CHECKPOINT_STEP = 8

PROMPT_TEMPLATES = {
    TaskType.GENERATION: "Answer the following question. End with 'Final answer: <answer>'.\n\n{input}",
    TaskType.OPEN_QA: "Answer the following question concisely. End with 'Final answer: <answer>'.\n\n{input}",
    TaskType.MATH: "Solve the problem step by step. End with 'Final answer: <answer>'.\n\n{input}",
    TaskType.MULTIPLE_CHOICE: (
        "Answer the multiple-choice question with the letter of the correct option.\n\n{input}\n\n{choices_block}\n\nAnswer:"
    ),
    TaskType.CODE: "Write the code requested below. Output only code.\n\n{input}",
}

FAILURE_EXIT_CODES = {"intent": 2, "plan": 3, "resolution": 4, "scoring": 5, "recommendation": 5}


@dataclass
class PipelineConfig:
    gallery: Gallery
    hub: HubClient
    llm: Optional[object] = None
    model: Optional[object] = None
    embedder: Optional[object] = None
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    registry: Optional[MetricRegistry] = None
    runs_root: Path = Path("runs")
    cache_root: Path = Path("cache")
    auto_approve: bool = True
    max_samples: int = DEFAULT_MAX_SAMPLES
    parallelism: int = DEFAULT_PARALLELISM
    model_id: str = "unknown"
    analyst_budget: int = 5
    stop_after: Optional[str] = None  # None | "plan" | "recommend"
    render_charts: bool = True

    def __post_init__(self):
        if self.registry is None:
            self.registry = default_registry()


class PipelineRun:
    """One run: single-writer state plus its evidence trail and file layout."""

    def __init__(self, config: PipelineConfig, request_text: str, run_id: Optional[str] = None):
        self.config = config
        self.lock = threading.RLock()
        run_id = run_id or f"run-{uuid.uuid4().hex[:12]}"
        self.paths = RunPaths(config.runs_root, run_id).ensure()
        self.state = RunState(run_id=run_id, request_text=request_text, model_id=config.model_id)
        self.evidence = EvidenceLog(self.paths.evidence_path)
        self.local_benchmarks: dict[str, dict[str, Any]] = {}
        self._index = None
        self._persist()

    # -- bookkeeping -------------------------------------------------------

    def _persist(self) -> None:
        path = self.paths.state_path(self.state.step_index)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(serialize_state(self.state) + b"\n")

    def _record(self, kind: EvidenceKind, payload: dict[str, Any]) -> None:
        self.evidence.append(self.state.run_id, self.state.step_index, kind, payload, state_hash(self.state))

    def _llm_recorder(self, purpose: str) -> Callable[[dict[str, Any]], None]:
        def record(payload: dict[str, Any]) -> None:
            tokens = int(payload.get("prompt_tokens", 0)) + int(payload.get("completion_tokens", 0))
            self.state.token_usage += tokens
            self._record(EvidenceKind.LLM_CALL, {"purpose": purpose, **payload})

        return record

    def _advance_step(self, step: int) -> None:
        self.state.step_index = step
        self._persist()

    def _fail(self, failure_class: str, message: str) -> None:
        self.state.status = RunStatus.FAILED
        self.state.failure = failure_class
        self._record(EvidenceKind.DECISION, {"event": "failed", "failure": failure_class, "message": message})
        self._persist()
        logger.warning("run %s failed at %s: %s", self.state.run_id, failure_class, message)

    def _next_checkpoint_id(self, stage: str) -> str:
        snapshot_dir = self.paths.snapshot_path("x").parent
        existing = len(list(snapshot_dir.glob("*.json")))
        return f"{stage}-{existing + 1}"

    def _create_checkpoint(self, stage: str, step: int) -> CheckpointRecord:
        self.state.step_index = step
        self.state.status = RunStatus.AWAITING_DECISION
        snapshot_bytes = serialize_state(self.state)
        snapshot_hash = state_hash(self.state)
        checkpoint = CheckpointRecord(
            checkpoint_id=self._next_checkpoint_id(stage),
            step_index=step,
            snapshot_hash=snapshot_hash,
            decision=DecisionKind.PENDING,
        )
        self.paths.snapshot_path(checkpoint.checkpoint_id).write_bytes(snapshot_bytes + b"\n")
        self.state.checkpoints.append(checkpoint)
        self._record(EvidenceKind.DECISION, {"event": "checkpoint", "checkpoint_id": checkpoint.checkpoint_id, "snapshot_hash": snapshot_hash})
        self._persist()
        return checkpoint

    def pending_checkpoint(self) -> Optional[CheckpointRecord]:
        for checkpoint in reversed(self.state.checkpoints):
            if checkpoint.decision is DecisionKind.PENDING:
                return checkpoint
        return None

    # -- pipeline steps ----------------------------------------------------

    def advance(self) -> RunState:
        """Execute steps until a pending checkpoint, failure, or completion."""
        with self.lock:
            while True:
                if self.state.status in (RunStatus.FAILED, RunStatus.COMPLETED):
                    return self.state
                if self.state.status is RunStatus.AWAITING_DECISION:
                    checkpoint = self.pending_checkpoint()
                    if checkpoint is None:
                        self.state.status = RunStatus.RUNNING
                        continue
                    if self.config.auto_approve and not (self.config.stop_after == "plan" and checkpoint.step_index == PLAN_CHECKPOINT_STEP):
                        self._apply_approval(checkpoint, note="auto-approved")
                        continue
                    return self.state
                step = self.state.step_index
                if step < 1:
                    self._step_intent()
                elif step < 3:
                    self._step_retrieval_and_selection()
                elif step < PLAN_CHECKPOINT_STEP:
                    self._create_checkpoint("plan", PLAN_CHECKPOINT_STEP)
                elif step < 5:
                    self._step_resolution()
                elif step < CONFIG_CHECKPOINT_STEP:
                    self._create_checkpoint("config", CONFIG_CHECKPOINT_STEP)
                elif step < 7:
                    self._step_scoring()
                elif step < FINAL_CHECKPOINT_STEP:
                    self._step_report()
                else:
                    self.state.status = RunStatus.COMPLETED
                    self._persist()
                    return self.state

    def _step_intent(self) -> None:
        try:
            intent = structure_intent(
                self.state.request_text,
                llm=self.config.llm,
                gallery=self.config.gallery,
                recorder=self._llm_recorder("intent_structuring"),
            )
        except IntentError as exc:
            self._fail("intent", str(exc))
            return
        self.state.intent = intent
        self._advance_step(1)
        self._record(EvidenceKind.DECISION, {"event": "intent", "intent": intent.to_dict()})

    def _tfidf_index(self):
        if self._index is None:
            self._index = build_tfidf_index(self.config.gallery)
        return self._index

    def _step_retrieval_and_selection(self) -> None:
        intent = self.state.intent
        query = retrieval_query(intent)
        config = self.config.retrieval
        backend = config.backend
        try:
            if backend == "embedding" and self.config.embedder is not None:
                ranked = score_embedding(self.config.embedder, self.config.gallery, query)
            else:
                backend = "tfidf"
                ranked = score_tfidf(self._tfidf_index(), query, config)
        except RetrievalBackendError as exc:
            logger.warning("embedding backend failed (%s); falling back to tfidf", exc)
            backend = "tfidf"
            config = RetrievalConfig(backend="tfidf", k=config.k, keyword_bonus_weight=config.keyword_bonus_weight)
            ranked = score_tfidf(self._tfidf_index(), query, config)
        if backend != config.backend:
            config = RetrievalConfig(backend=backend, k=config.k, keyword_bonus_weight=config.keyword_bonus_weight)
        quality, marginal = partition(ranked, config)
        self._record(
            EvidenceKind.RETRIEVAL,
            {
                "backend": backend,
                "query": query,
                "tau": config.tau,
                "ranked": [{"entry": c.entry_ref, "score": round(c.score, 6), "tier": c.tier} for c in ranked],
                "quality": len(quality),
                "marginal": len(marginal),
            },
        )
        pool = candidates_to_items(quality + marginal, self.config.gallery)
        deficit = max(0, config.k - len(quality))
        if deficit > 0:
            hub_items = fallback_search(
                self.config.hub,
                intent,
                deficit,
                self.config.gallery,
                config,
                recorder=lambda payload: self._record(EvidenceKind.RETRIEVAL, payload),
            )
            pool.extend(hub_items)
        self._advance_step(2)

        def resolution_precheck(item: PlanItem) -> tuple[bool, str]:
            if not item.display_name.strip():
                return False, "empty benchmark name"
            if item.source is PlanSource.GALLERY and self.config.gallery.lookup(item.display_name) is None:
                return False, "gallery entry no longer present"
            return True, ""

        try:
            plan = select_plan(
                pool,
                intent,
                config,
                gallery=self.config.gallery,
                precheck=resolution_precheck,
                recorder=lambda payload: self._record(EvidenceKind.DECISION, payload),
            )
        except PlanError as exc:
            self._fail("plan", str(exc))
            return
        self.state.plan = plan
        self._advance_step(3)
        self._record(EvidenceKind.DECISION, {"event": "plan_selected", "plan": plan.to_dict()})

    def _step_resolution(self) -> None:
        self.state.step_index = 5
        bench_infos: list[BenchInfo] = []
        survivors: list[PlanItem] = []
        dropped: list[dict[str, str]] = []
        seen_repos: set[str] = set()
        for item in self.state.plan.items:
            try:
                if item.canonical_id and item.canonical_id.startswith("local:"):
                    info = self._build_local_benchinfo(item)
                else:
                    info = build_and_validate(
                        item,
                        self.config.gallery,
                        self._hub_with_recorder(),
                        self.config.cache_root,
                        recorder=lambda payload: self._record(EvidenceKind.RESOLUTION, payload),
                    )
            except (ResolutionError, ConfigError, MappingError, BenchValidationError, NotFoundError, TransportError, CorruptDownloadError) as exc:
                dropped.append({"item": item.display_name, "error": str(exc)})
                self._record(EvidenceKind.RESOLUTION, {"item": item.display_name, "error": str(exc)})
                continue
            if info.benchmark_id in seen_repos:
                self._record(EvidenceKind.RESOLUTION, {"item": item.display_name, "error": f"duplicate of {info.benchmark_id}"})
                continue
            seen_repos.add(info.benchmark_id)
            item.canonical_id = info.benchmark_id
            survivors.append(item)
            bench_infos.append(info)
            self.paths.benchinfo_path(info.benchmark_id).write_bytes(canonical_json_bytes(info.to_dict()) + b"\n")
        if not bench_infos:
            message = f"no plan item survived resolution: {dropped}"
            if self.config.auto_approve:
                self._fail("resolution", message)
                return
            # interactive runs block at a fresh plan checkpoint so the human
            # can edit, refine, or inject instead of losing the run
            self.state.step_index = 4
            checkpoint = self._create_checkpoint("plan", PLAN_CHECKPOINT_STEP)
            checkpoint.user_note = message
            self._persist()
            return
        self.state.bench_infos = bench_infos
        if len(survivors) != len(self.state.plan.items):
            self.state.plan = BenchmarkPlan(items=survivors, intent_snapshot=self.state.plan.intent_snapshot, budget=self.state.plan.budget)
        self._persist()

    def _hub_with_recorder(self) -> HubClient:
        hub = self.config.hub
        hub.recorder = lambda payload: self._record(EvidenceKind.DOWNLOAD, payload)
        return hub

    def _build_local_benchinfo(self, item: PlanItem) -> BenchInfo:
        descriptor = self.local_benchmarks.get(item.display_name)
        if descriptor is None:
            raise ResolutionError(f"{item.display_name}: no stored local descriptor")
        mapping = KeyMapping.from_dict(descriptor["key_mapping"])
        mapping.validate()
        path = Path(descriptor["path"])
        if not path.exists():
            raise ResolutionError(f"{item.display_name}: local file {path} missing")
        rows = load_cached_rows(path, resolve_mod.VALIDATION_SAMPLE_SIZE)
        if not rows:
            raise BenchValidationError(f"{item.display_name}: local benchmark has no rows")
        resolve_mod._validate_mapping_on_rows(mapping, rows)
        task_type = TaskType(descriptor.get("task_type", "generation"))
        info = BenchInfo(
            benchmark_id=item.canonical_id,
            source="local",
            config_name="local",
            split=descriptor.get("split", "local"),
            key_mapping=mapping,
            task_type=task_type,
            revision="unversioned",
            cache_path=str(path),
            metrics_override=descriptor.get("metrics_override"),
            rationale="user-injected local benchmark",
        )
        info.validate()
        return info

    def _metric_params(self, info: BenchInfo) -> dict[str, dict[str, Any]]:
        intent = self.state.intent or EvalIntent()
        return {
            "format_compliance": {"expected_format": intent.constraints.get("format", "none")},
            "reasoning_efficiency": {"budget": constraint_int(intent, "reasoning_budget", 256, minimum=1)},
        }

    def _step_scoring(self) -> None:
        self.state.step_index = 7
        metric_plans: list[MetricPlan] = []
        recommendation_errors: list[str] = []
        for info in self.state.bench_infos:
            rows = load_cached_rows(info.cache_path, 3)
            context = {
                "prompt_template": PROMPT_TEMPLATES[info.task_type],
                "sample_rows": rows,
                "task": info.task_type.value,
            }
            try:
                plan = recommend_metrics(
                    info,
                    context,
                    llm=None if info.metrics_override else self.config.llm,
                    registry=self.config.registry,
                    recorder=self._llm_recorder("metric_recommendation"),
                )
            except RecommendationError as exc:
                recommendation_errors.append(str(exc))
                continue
            metric_plans.append(plan)
            self._record(EvidenceKind.DECISION, {"event": "metric_plan", "plan": plan.to_dict()})
        if recommendation_errors:
            self._fail("recommendation", "; ".join(recommendation_errors))
            return
        self.state.metric_plans = metric_plans

        if self.config.stop_after == "recommend":
            self.state.status = RunStatus.COMPLETED
            self._persist()
            return

        if self.config.model is None:
            self._fail("scoring", "no subject model configured")
            return

        results: list[BenchmarkResult] = []
        plan_by_id = {p.benchmark_id: p for p in metric_plans}
        for info in self.state.bench_infos:
            results.append(self._score_benchmark(info, plan_by_id[info.benchmark_id]))
        if all(r.failed for r in results):
            self._fail("scoring", "every benchmark failed during prediction/scoring")
            return
        self.state.results = results
        self._persist()

    def _score_benchmark(self, info: BenchInfo, metric_plan: MetricPlan) -> BenchmarkResult:
        cap = constraint_int(self.state.intent, "max_samples_per_benchmark", self.config.max_samples, minimum=1)
        rows = load_cached_rows(info.cache_path, cap)
        normalized = normalize_rows(info, rows)
        template = PROMPT_TEMPLATES[info.task_type]
        try:
            predictions = generate_predictions(
                self.config.model,
                normalized,
                template,
                parallelism=self.config.parallelism,
                recorder=self._llm_recorder("prediction"),
            )
        except (PredictionError, ValueError) as exc:
            self._record(EvidenceKind.PREDICTION, {"benchmark": info.benchmark_id, "error": str(exc)})
            return BenchmarkResult(benchmark_id=info.benchmark_id, samples=[], outcomes=[], failed=True, error=str(exc))
        samples = [
            SampleRecord(
                index=row["index"],
                input=row["input"],
                prediction=pred.text,
                references=row["references"],
                pred_error=pred.error is not None,
                pred_tokens=pred.completion_tokens,
            )
            for row, pred in zip(normalized, predictions)
        ]
        self._record(
            EvidenceKind.PREDICTION,
            {"benchmark": info.benchmark_id, "samples": len(samples), "failed_rows": sum(1 for p in predictions if p.error)},
        )
        outcomes = run_metrics(
            metric_plan,
            samples,
            registry=self.config.registry,
            parallelism=self.config.parallelism,
            params=self._metric_params(info),
        )
        for outcome in outcomes:
            self._record(
                EvidenceKind.METRIC,
                {"benchmark": info.benchmark_id, "metric": outcome.metric, "aggregate": outcome.aggregate, "priority": outcome.priority},
            )
        return BenchmarkResult(benchmark_id=info.benchmark_id, samples=samples, outcomes=outcomes)

    def _tags_by_benchmark(self) -> dict[str, list[str]]:
        tags: dict[str, list[str]] = {}
        for item in self.state.plan.items:
            key = item.canonical_id or item.display_name
            entry = self.config.gallery.by_repo(key) if item.canonical_id else self.config.gallery.lookup(item.display_name)
            tags[key] = list(entry.category_tags) if entry else list(item.category_tags)
        return tags

    def _step_report(self) -> None:
        self.state.step_index = 8
        usable = [r for r in self.state.results if not r.failed]
        failures = failed_samples_by_benchmark(usable, self.state.metric_plans)
        all_failed = [s for samples in failures.values() for s in samples]
        histogram, cases = analyze_failures(
            all_failed,
            llm=self.config.llm,
            sample_budget=self.config.analyst_budget,
            run_id=self.state.run_id,
            params={"expected_format": self.state.intent.constraints.get("format", "none")},
            recorder=self._llm_recorder("error_classification"),
        )
        bundle = build_bundle(
            usable,
            self.state.metric_plans,
            self._tags_by_benchmark(),
            histogram,
            cases,
            metadata={
                "run_id": self.state.run_id,
                "model_id": self.state.model_id,
                "started_at": self.state.started_at,
                "token_usage": self.state.token_usage,
            },
        )
        self.paths.report_json_path.write_text(render(bundle, "json"), encoding="utf-8")
        self.paths.report_md_path.write_text(render(bundle, "markdown"), encoding="utf-8")
        self.paths.report_csv_path.write_text(write_csv(bundle), encoding="utf-8")
        if self.config.render_charts:
            render_figures(bundle, self.paths.figures_dir)
        self.state.report_ref = str(self.paths.report_json_path)
        self._record(EvidenceKind.DECISION, {"event": "report", "report_ref": self.state.report_ref})
        self._create_checkpoint("final", FINAL_CHECKPOINT_STEP)

    # -- checkpoint decisions ----------------------------------------------

    def _apply_approval(self, checkpoint: CheckpointRecord, note: Optional[str] = None) -> None:
        checkpoint.decision = DecisionKind.APPROVED
        checkpoint.user_note = note
        self.state.status = RunStatus.RUNNING
        if checkpoint.step_index == FINAL_CHECKPOINT_STEP:
            self.state.status = RunStatus.COMPLETED
        self._record(EvidenceKind.DECISION, {"event": "decision", "checkpoint_id": checkpoint.checkpoint_id, "decision": "approved", "note": note})
        self._persist()

    def checkpoint_decide(self, checkpoint_id: str, decision: str, payload: Optional[dict[str, Any]] = None) -> RunState:
        with self.lock:
            checkpoint = self.pending_checkpoint()
            if checkpoint is None or checkpoint.checkpoint_id != checkpoint_id or self.state.status is not RunStatus.AWAITING_DECISION:
                raise StateError(f"checkpoint {checkpoint_id!r} is not awaiting a decision")
            payload = payload or {}
            if decision == "approved":
                self._apply_approval(checkpoint, note=payload.get("note"))
            elif decision == "edited":
                self._apply_edit(checkpoint, payload)
            elif decision == "refined":
                self._apply_refine(checkpoint, payload)
            elif decision == "rolled_back":
                return self.rollback(checkpoint_id)
            else:
                raise StateError(f"unknown decision {decision!r}")
            return self.advance()

    def _apply_edit(self, checkpoint: CheckpointRecord, payload: dict[str, Any]) -> None:
        if "inject" in payload:
            self._apply_inject(payload["inject"])
        elif "plan" in payload and checkpoint.step_index == PLAN_CHECKPOINT_STEP:
            plan = BenchmarkPlan.from_dict(payload["plan"])
            plan.validate()
            self.state.plan = plan
        elif "bench_infos" in payload and checkpoint.step_index == CONFIG_CHECKPOINT_STEP:
            infos = [BenchInfo.from_dict(d) for d in payload["bench_infos"]]
            for info in infos:
                info.validate()
            self.state.bench_infos = infos
        else:
            raise StateError("edit payload does not match this checkpoint")
        checkpoint.decision = DecisionKind.EDITED
        checkpoint.user_note = payload.get("note")
        self.state.status = RunStatus.RUNNING
        self._record(EvidenceKind.DECISION, {"event": "decision", "checkpoint_id": checkpoint.checkpoint_id, "decision": "edited"})
        self._persist()

    def _apply_inject(self, descriptor: dict[str, Any]) -> None:
        name = descriptor.get("name") or Path(descriptor["path"]).stem
        mapping = KeyMapping.from_dict(descriptor["key_mapping"])
        mapping.validate()
        self.local_benchmarks[name] = descriptor
        item = PlanItem(
            display_name=name,
            canonical_id=f"local:{name}",
            source=PlanSource.USER,
            relevance_score=1.0,
            match_tier=MatchTier.FORCED,
            justification="user-injected local benchmark",
        )
        items = [i for i in self.state.plan.items if i.display_name != name]
        if len(items) + 1 > self.state.plan.budget:
            evictable = [i for i in items if i.match_tier is not MatchTier.FORCED]
            if not evictable:
                raise StateError("plan is full of forced items; cannot inject")
            items.remove(min(evictable, key=lambda i: i.relevance_score))
        self.state.plan = BenchmarkPlan(
            items=items + [item],
            intent_snapshot=self.state.plan.intent_snapshot,
            budget=self.state.plan.budget,
        )
        self.state.plan.validate()

    def _apply_refine(self, checkpoint: CheckpointRecord, payload: dict[str, Any]) -> None:
        new_text = payload.get("request_text", "").strip()
        if not new_text:
            raise StateError("refine decision requires request_text")
        checkpoint.decision = DecisionKind.REFINED
        checkpoint.user_note = new_text
        self._record(EvidenceKind.DECISION, {"event": "decision", "checkpoint_id": checkpoint.checkpoint_id, "decision": "refined"})
        self.state.request_text = new_text
        self.state.status = RunStatus.RUNNING
        # re-run intent, retrieval, and selection; a fresh plan checkpoint follows
        self.state.step_index = 0
        self.state.intent = None
        self.state.plan = None
        self._persist()

    def rollback(self, checkpoint_id: str) -> RunState:
        with self.lock:
            record = next((c for c in self.state.checkpoints if c.checkpoint_id == checkpoint_id), None)
            snapshot_path = self.paths.snapshot_path(checkpoint_id)
            if record is None or not snapshot_path.exists():
                raise StateError(f"unknown checkpoint {checkpoint_id!r}")
            restored = deserialize_state(snapshot_path.read_bytes())
            restored_hash = state_hash(restored)
            if restored_hash != record.snapshot_hash:
                raise StateError(f"snapshot hash mismatch for {checkpoint_id!r}")
            self._record(
                EvidenceKind.DECISION,
                {"event": "rollback", "checkpoint_id": checkpoint_id, "restored_hash": restored_hash, "verified": True},
            )
            self.state = restored
            self.state.status = RunStatus.AWAITING_DECISION
            pending = self.pending_checkpoint()
            if pending is None:
                # the snapshot predates its own record; recreate the pause point
                stage = checkpoint_id.rsplit("-", 1)[0]
                self._create_checkpoint(stage, record.step_index)
            self._persist()
            return self.state


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def run_pipeline(request_text: str, config: PipelineConfig, run_id: Optional[str] = None) -> PipelineRun:
    """Create a run and advance it as far as configuration allows."""
    run = PipelineRun(config, request_text, run_id=run_id)
    run.advance()
    return run


# ---------------------------------------------------------------------------
# Cumulative success-rate accounting (the batch harness)
# ---------------------------------------------------------------------------

LABEL_ORDER = ("none", "plan_executable", "auto_complete", "full_plan")


def outcome_label(run: PipelineRun) -> str:
    """Furthest cumulative checkpoint the run passed.

    plan_executable: intent parsed and a non-empty plan selected;
    auto_complete: every plan item resolved and validated without drops;
    full_plan: metric recommendation succeeded for every benchmark.
    """
    state = run.state
    if state.plan is None:
        return "none"
    drops = any("error" in r.payload for r in run.evidence.of_kind(EvidenceKind.RESOLUTION))
    if state.bench_infos is None or drops:
        return "plan_executable"
    if state.metric_plans is None or state.failure == "recommendation":
        return "auto_complete"
    return "full_plan"


def compute_success_metrics(outcomes: list[dict[str, Any]]) -> dict[str, float]:
    """Cumulative Plan-Executable / Auto-Complete / Full-Plan rates + avg tokens.

    Each outcome: {"label": one of LABEL_ORDER, "token_usage": int}.
    """
    if not outcomes:
        raise ValueError("success metrics need at least one outcome")
    rank = {label: i for i, label in enumerate(LABEL_ORDER)}
    for o in outcomes:
        if o["label"] not in rank:
            raise ValueError(f"unknown outcome label {o['label']!r}")
    n = len(outcomes)
    at_least = lambda level: sum(1 for o in outcomes if rank[o["label"]] >= rank[level]) / n  # noqa: E731
    return {
        "plan_executable_rate": at_least("plan_executable"),
        "auto_complete_rate": at_least("auto_complete"),
        "full_plan_rate": at_least("full_plan"),
        "avg_tokens": sum(int(o.get("token_usage", 0)) for o in outcomes) / n,
    }


def run_success_batch(requests: list[str], make_config: Callable[[], PipelineConfig]) -> tuple[list[dict[str, Any]], dict[str, float]]:
    """Run each request through intent -> ... -> metric recommendation and
    label how far it got (the Table-2-style accounting harness)."""
    outcomes = []
    for i, request in enumerate(requests):
        config = make_config()
        config.stop_after = "recommend"
        config.auto_approve = True
        run = run_pipeline(request, config, run_id=f"bench-{i:03d}")
        outcomes.append(
            {
                "request": request,
                "label": outcome_label(run),
                "token_usage": run.state.token_usage,
                "failure": run.state.failure,
            }
        )
    return outcomes, compute_success_metrics(outcomes)
