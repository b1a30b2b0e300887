"""Metric selection: user override, then LLM reasoning, then rule-based dispatch.

The dispatcher table below is the guaranteed floor: recommendation can never
fail and never returns a name missing from the registry.
"""

from __future__ import annotations

import logging
from typing import Any, Optional

from ..errors import RecommendationError, StructuredOutputError, TransportError
from ..model import BenchInfo, MetricPlan, TaskType
from .registry import MetricRegistry, default_registry

logger = logging.getLogger(__name__)

DISPATCH_TABLE: dict[str, list[str]] = {
    "math": ["math_verify", "extraction_rate", "format_compliance", "reasoning_efficiency"],
    "multiple_choice": ["exact_match", "format_compliance"],
    "code": ["soft_code_execution", "code_similarity", "format_compliance"],
    "generation": ["exact_match", "format_compliance", "reasoning_efficiency"],
    "open_qa": ["exact_match", "format_compliance", "reasoning_efficiency"],
}

_RECOMMEND_SCHEMA = {
    "type": "object",
    "properties": {
        "metrics": {"type": "array", "items": {"type": "string"}, "minItems": 1},
    },
    "required": ["metrics"],
}


def dispatch_rules(task_type: TaskType | str) -> list[str]:
    """Fixed task-type to metric-suite table; unknown types fall back to generation."""
    key = task_type.value if isinstance(task_type, TaskType) else str(task_type)
    return list(DISPATCH_TABLE.get(key, DISPATCH_TABLE["generation"]))


def _plan(bench_info: BenchInfo, names: list[str], provenance: str) -> MetricPlan:
    plan = MetricPlan(
        benchmark_id=bench_info.benchmark_id,
        selected=[(name, i + 1) for i, name in enumerate(names)],
        provenance=provenance,
    )
    plan.validate()
    return plan


def _build_prompt(bench_info: BenchInfo, context: dict[str, Any], registry: MetricRegistry) -> str:
    sample_rows = context.get("sample_rows", [])
    row_preview = "\n".join(str(r)[:300] for r in sample_rows[:3])
    return (
        "TASK: metric_recommendation\n"
        f"Benchmark: {bench_info.benchmark_id}\n"
        f"Task type: {bench_info.task_type.value}\n"
        f"Prompt template: {context.get('prompt_template', '')}\n"
        f"Sample rows:\n{row_preview}\n\n"
        "Registered metrics:\n"
        f"{registry.enumeration_text()}\n\n"
        "Select an ordered list of metric names for this benchmark. "
        'Reply as JSON: {"metrics": ["name", ...]}'
    )


def recommend_metrics(
    bench_info: BenchInfo,
    context: dict[str, Any],
    llm=None,
    registry: Optional[MetricRegistry] = None,
    recorder=None,
) -> MetricPlan:
    """Dual-track selection. Overrides are strict; LLM output is validated
    against the registry; anything else reverts to the dispatcher."""
    registry = registry or default_registry()
    if not len(registry):
        raise RecommendationError("metric registry is empty")

    if bench_info.metrics_override:
        unknown = [n for n in bench_info.metrics_override if n not in registry]
        if unknown:
            raise RecommendationError(
                f"{bench_info.benchmark_id}: metrics_override names unknown metrics {unknown}"
            )
        return _plan(bench_info, list(bench_info.metrics_override), "override")

    if llm is not None:
        from ..llm import ChatMessage, ChatRequest, chat

        request = ChatRequest(
            messages=[ChatMessage("user", _build_prompt(bench_info, context, registry))],
            response_schema=_RECOMMEND_SCHEMA,
        )
        try:
            response = chat(llm, request, recorder=recorder)
            names = response.parsed["metrics"] if response.parsed else []
            if names and all(n in registry for n in names):
                return _plan(bench_info, list(dict.fromkeys(names)), "llm")
            logger.info("LLM recommendation for %s rejected (unknown names %s)", bench_info.benchmark_id, names)
        except (StructuredOutputError, TransportError) as exc:
            logger.info("LLM recommendation for %s failed (%s); using dispatcher", bench_info.benchmark_id, exc)

    return _plan(bench_info, dispatch_rules(bench_info.task_type), "fallback")
