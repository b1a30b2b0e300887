"""Unified metric runner: parallel across samples, deterministic reduction."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional

from ..errors import RunnerError
from ..model import MetricOutcome, MetricPlan, SampleRecord
from .registry import MetricRegistry, default_registry


def _mean(values: list[float]) -> float:
    return math.fsum(values) / len(values)


def _sanitize(value: float) -> tuple[float, Optional[str]]:
    if not math.isfinite(value):
        return 0.0, "non-finite value replaced by 0"
    return float(value), None


def run_metrics(
    plan: MetricPlan,
    samples: list[SampleRecord],
    registry: Optional[MetricRegistry] = None,
    parallelism: int = 1,
    params: Optional[dict[str, dict[str, Any]]] = None,
) -> list[MetricOutcome]:
    """Compute every planned metric over all samples.

    Per-metric failures are isolated: a failing metric reports aggregate 0
    with an error detail while the other outcomes are unaffected.
    """
    if not samples:
        raise RunnerError("metric runner invoked with an empty sample list")
    registry = registry or default_registry()
    params = params or {}
    outcomes: list[MetricOutcome] = []
    for name, priority in plan.selected:
        descriptor, compute = registry.get(name)
        metric_params = params.get(name, {})
        if descriptor.scope == "report":
            outcomes.append(
                MetricOutcome(
                    metric=name,
                    aggregate=0.0,
                    priority=priority,
                    per_sample=None,
                    error="report-stage metric; computed during report generation",
                )
            )
            continue
        outcomes.append(_run_sample_metric(name, priority, compute, samples, metric_params, parallelism))
    return outcomes


def _run_sample_metric(
    name: str,
    priority: int,
    compute,
    samples: list[SampleRecord],
    metric_params: dict[str, Any],
    parallelism: int,
) -> MetricOutcome:
    def one(sample: SampleRecord) -> tuple[float, str, Optional[str]]:
        try:
            value, detail = compute(sample, metric_params)
        except Exception as exc:  # noqa: BLE001 - isolation boundary
            return 0.0, f"error: {exc}", str(exc)
        value, replaced = _sanitize(value)
        return value, (replaced or detail), replaced

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            evaluated = list(pool.map(one, samples))
    else:
        evaluated = [one(s) for s in samples]

    per_sample = [(s.index, value, detail) for s, (value, detail, _) in zip(samples, evaluated)]
    errors = [err for _, _, err in evaluated if err]
    return MetricOutcome(
        metric=name,
        aggregate=_mean([v for _, v, _ in per_sample]),
        priority=priority,
        per_sample=per_sample,
        error=errors[0] if errors else None,
    )
