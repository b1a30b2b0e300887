"""Assemble the report bundle from metric outcomes and scored samples."""

from __future__ import annotations

import math
from typing import Any, Optional

from ..metrics.builtin import compute_gini
from ..model import BenchmarkResult, MetricPlan, SampleRecord
from ..nl2bench import tokenize_mixed
from .bundle import LengthStats, ReportBundle

EXCERPT_LIMIT = 240
BLIND_SPOT_TOP = 5
BLIND_SPOT_EXAMPLES = 3
CONTINUOUS_CORRECT_THRESHOLD = 0.5

_STOPWORDS = frozenset(
    """a an the of to in on for and or is are was were be been being do does did done
    what which who whom whose when where why how this that these those with without
    from into onto as at by if then else not no yes it its his her their our your
    i you he she we they them us will would can could should may might must
    的 了 是 在 和 有""".split()
)


def _primary_outcome(result: BenchmarkResult, plan: MetricPlan):
    primary = plan.primary_metric()
    for outcome in result.outcomes:
        if outcome.metric == primary:
            return outcome
    return result.outcomes[0] if result.outcomes else None


def _correct_indices(result: BenchmarkResult, plan: MetricPlan) -> dict[int, bool]:
    """Per-sample correctness under the primary metric.

    Binary metrics require 1; continuous metrics use >= 0.5.
    """
    outcome = _primary_outcome(result, plan)
    if outcome is None or not outcome.per_sample:
        return {}
    values = [v for _, v, _ in outcome.per_sample]
    binary = all(v in (0.0, 1.0) for v in values)
    verdicts = {}
    for index, value, _ in outcome.per_sample:
        verdicts[index] = value >= 1.0 if binary else value >= CONTINUOUS_CORRECT_THRESHOLD
    return verdicts


def build_macro(
    results: list[BenchmarkResult],
    plans: list[MetricPlan],
    tags_by_benchmark: dict[str, list[str]],
) -> tuple[dict[str, float], list[dict[str, Any]]]:
    """Radar: category -> mean of primary aggregates over tagged benchmarks.
    Sunburst: the full category -> benchmark -> metric tree."""
    if not results:
        raise ValueError("build_macro requires at least one benchmark result")
    plan_by_id = {p.benchmark_id: p for p in plans}
    per_category: dict[str, list[float]] = {}
    sunburst_tree: dict[str, list[dict[str, Any]]] = {}
    for result in results:
        plan = plan_by_id[result.benchmark_id]
        primary = _primary_outcome(result, plan)
        tags = tags_by_benchmark.get(result.benchmark_id) or ["uncategorized"]
        metrics_view = [
            {"metric": o.metric, "score": o.aggregate, "priority": o.priority}
            for o in sorted(result.outcomes, key=lambda o: o.priority)
        ]
        for tag in tags:
            per_category.setdefault(tag, []).append(primary.aggregate if primary else 0.0)
            sunburst_tree.setdefault(tag, []).append({"benchmark": result.benchmark_id, "metrics": metrics_view})
    radar = {tag: math.fsum(vals) / len(vals) for tag, vals in sorted(per_category.items())}
    sunburst = [{"category": tag, "benchmarks": sunburst_tree[tag]} for tag in sorted(sunburst_tree)]
    return radar, sunburst


def failed_samples_by_benchmark(
    results: list[BenchmarkResult],
    plans: list[MetricPlan],
) -> dict[str, list[SampleRecord]]:
    plan_by_id = {p.benchmark_id: p for p in plans}
    out: dict[str, list[SampleRecord]] = {}
    for result in results:
        verdicts = _correct_indices(result, plan_by_id[result.benchmark_id])
        failures = [s for s in result.samples if not verdicts.get(s.index, True)]
        if failures:
            out[result.benchmark_id] = failures
    return out


def _length_stats(lengths: list[int]) -> Optional[LengthStats]:
    if not lengths:
        return None
    ordered = sorted(lengths)
    n = len(ordered)
    median = float(ordered[n // 2]) if n % 2 == 1 else (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    p90_index = min(n - 1, max(0, math.ceil(0.9 * n) - 1))
    return LengthStats(
        mean=math.fsum(ordered) / n,
        median=median,
        p90=float(ordered[p90_index]),
        count=n,
    )


def build_diagnostic(
    results: list[BenchmarkResult],
    plans: list[MetricPlan],
    analyst_histogram: dict[str, int],
    analyst_cases: list[dict[str, Any]],
) -> dict[str, Any]:
    """Failure attribution, blind-spot token clusters, and length stats."""
    plan_by_id = {p.benchmark_id: p for p in plans}
    correct_lengths: list[int] = []
    incorrect_lengths: list[int] = []
    token_counts: dict[str, int] = {}
    token_examples: dict[str, list[str]] = {}

    for result in results:
        verdicts = _correct_indices(result, plan_by_id[result.benchmark_id])
        for sample in result.samples:
            length = len(sample.prediction.split())
            if verdicts.get(sample.index, True):
                correct_lengths.append(length)
                continue
            incorrect_lengths.append(length)
            ref = f"{result.benchmark_id}#{sample.index}"
            for token in set(tokenize_mixed(sample.input)):
                if token in _STOPWORDS or len(token) < 2:
                    continue
                token_counts[token] = token_counts.get(token, 0) + 1
                token_examples.setdefault(token, [])
                if len(token_examples[token]) < BLIND_SPOT_EXAMPLES:
                    token_examples[token].append(ref)

    top_tokens = sorted(token_counts.items(), key=lambda kv: (-kv[1], kv[0]))[:BLIND_SPOT_TOP]
    blind_spots = [{"token": t, "count": c, "examples": token_examples[t]} for t, c in top_tokens]
    return {
        "error_histogram": dict(analyst_histogram),
        "analyst_cases": analyst_cases,
        "blind_spots": blind_spots,
        "length_correct": _length_stats(correct_lengths),
        "length_incorrect": _length_stats(incorrect_lengths),
    }


def _excerpt(text: str) -> str:
    snippet = " ".join(text.split())
    return snippet[:EXCERPT_LIMIT]


def build_micro(results: list[BenchmarkResult], plans: list[MetricPlan]) -> list[dict[str, Any]]:
    """Case rows for failing samples, traceable via (benchmark, sample_index)."""
    plan_by_id = {p.benchmark_id: p for p in plans}
    rows = []
    for result in results:
        verdicts = _correct_indices(result, plan_by_id[result.benchmark_id])
        failing_metrics_by_index: dict[int, list[str]] = {}
        for outcome in result.outcomes:
            for index, value, _ in outcome.per_sample or []:
                if value < 1.0:
                    failing_metrics_by_index.setdefault(index, []).append(outcome.metric)
        for sample in result.samples:
            if verdicts.get(sample.index, True):
                continue
            rows.append(
                {
                    "benchmark": result.benchmark_id,
                    "sample_index": sample.index,
                    "input_excerpt": _excerpt(sample.input),
                    "prediction_excerpt": _excerpt(sample.prediction),
                    "reference_excerpt": _excerpt(" | ".join(sample.references)),
                    "failing_metrics": failing_metrics_by_index.get(sample.index, []),
                }
            )
    return rows


def build_bundle(
    results: list[BenchmarkResult],
    plans: list[MetricPlan],
    tags_by_benchmark: dict[str, list[str]],
    analyst_histogram: dict[str, int],
    analyst_cases: list[dict[str, Any]],
    metadata: dict[str, Any],
) -> ReportBundle:
    radar, sunburst = build_macro(results, plans, tags_by_benchmark)
    diagnostic = build_diagnostic(results, plans, analyst_histogram, analyst_cases)
    gini, gini_detail = compute_gini(radar)
    return ReportBundle(
        radar=radar,
        sunburst=sunburst,
        error_histogram=diagnostic["error_histogram"],
        analyst_cases=diagnostic["analyst_cases"],
        blind_spots=diagnostic["blind_spots"],
        length_correct=diagnostic["length_correct"],
        length_incorrect=diagnostic["length_incorrect"],
        capability_balance={"gini": gini, "detail": gini_detail},
        micro=build_micro(results, plans),
        metadata=metadata,
    )
