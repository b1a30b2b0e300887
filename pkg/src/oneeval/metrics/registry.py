"""Metric registration: descriptors with semantic metadata, indexed by name.

Metrics self-register through the ``@metric`` decorator; the registry
enumeration feeds both the recommendation prompt and ``docs/metrics.md``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from ..errors import RegistrationError

# scope: "sample"  - computed per sample, aggregated by mean
#        "corpus"  - computed once over the full sample list
#        "report"  - computed at report level (cross-benchmark or judge-based)
SCOPES = ("sample", "corpus", "report")


@dataclass
class MetricDescriptor:
    name: str
    description: str
    applicable_tasks: frozenset[str]
    decision_rules: str
    needs_llm: bool = False
    default_priority: int = 10
    scope: str = "sample"

    def validate(self) -> None:
        if not self.name:
            raise RegistrationError("metric name must be non-empty")
        if not self.description:
            raise RegistrationError(f"metric {self.name}: description must be non-empty")
        if self.scope not in SCOPES:
            raise RegistrationError(f"metric {self.name}: unknown scope {self.scope!r}")


class MetricRegistry:
    def __init__(self):
        self._metrics: dict[str, tuple[MetricDescriptor, Callable]] = {}

    def register(self, descriptor: MetricDescriptor, compute: Callable) -> None:
        descriptor.validate()
        if descriptor.name in self._metrics:
            raise RegistrationError(f"metric {descriptor.name!r} already registered")
        self._metrics[descriptor.name] = (descriptor, compute)

    def __contains__(self, name: str) -> bool:
        return name in self._metrics

    def __len__(self) -> int:
        return len(self._metrics)

    def get(self, name: str) -> tuple[MetricDescriptor, Callable]:
        if name not in self._metrics:
            raise KeyError(f"metric {name!r} is not registered")
        return self._metrics[name]

    def descriptor(self, name: str) -> MetricDescriptor:
        return self.get(name)[0]

    def names(self) -> list[str]:
        return list(self._metrics)

    def __iter__(self) -> Iterator[MetricDescriptor]:
        return (d for d, _ in self._metrics.values())

    def enumeration_text(self) -> str:
        """One line per metric, injected into the recommendation prompt."""
        lines = []
        for d in self:
            tasks = ", ".join(sorted(d.applicable_tasks)) or "any"
            lines.append(f"- {d.name} (tasks: {tasks}): {d.description} Decision rules: {d.decision_rules}")
        return "\n".join(lines)


def metric(
    registry: MetricRegistry,
    name: str,
    description: str,
    applicable_tasks: tuple[str, ...] = (),
    decision_rules: str = "",
    needs_llm: bool = False,
    default_priority: int = 10,
    scope: str = "sample",
):
    """Decorator attaching semantic metadata and registering the function."""

    def wrap(fn: Callable) -> Callable:
        registry.register(
            MetricDescriptor(
                name=name,
                description=description,
                applicable_tasks=frozenset(applicable_tasks),
                decision_rules=decision_rules,
                needs_llm=needs_llm,
                default_priority=default_priority,
                scope=scope,
            ),
            fn,
        )
        return fn

    return wrap


_DEFAULT: MetricRegistry | None = None


def default_registry() -> MetricRegistry:
    """Registry with all built-in metrics registered (built once)."""
    global _DEFAULT
    if _DEFAULT is None:
        from . import builtin

        _DEFAULT = builtin.build_registry()
    return _DEFAULT


def render_registry_doc(registry: MetricRegistry | None = None) -> str:
    """Markdown documentation for the registered metric library."""
    registry = registry or default_registry()
    lines = [
        "# Metric library",
        "",
        "Metrics register themselves with semantic metadata; this file is",
        "generated from the live registry (`python3 -m oneeval.metrics.doc`).",
        "",
        "| Name | Tasks | Scope | Needs judge | Description |",
        "|---|---|---|---|---|",
    ]
    for d in registry:
        tasks = ", ".join(sorted(d.applicable_tasks)) or "any"
        lines.append(f"| `{d.name}` | {tasks} | {d.scope} | {'yes' if d.needs_llm else 'no'} | {d.description} |")
    lines += ["", "## Decision rules", ""]
    for d in registry:
        lines.append(f"- **{d.name}**: {d.decision_rules}")
    return "\n".join(lines) + "\n"
