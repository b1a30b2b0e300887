"""Exception taxonomy shared across the pipeline.

Stage errors map onto CLI exit codes in ``oneeval.cli`` and onto the
cumulative success-rate accounting in ``oneeval.pipeline``.
"""

from __future__ import annotations


class OneEvalError(Exception):
    """Base class for all package errors."""


class SerializationError(OneEvalError):
    """State cannot be canonically serialized (e.g. non-finite numbers)."""


class IntentError(OneEvalError):
    """Request could not be structured into a usable evaluation intent."""


class PlanError(OneEvalError):
    """No executable benchmark plan could be assembled."""


class RetrievalBackendError(OneEvalError):
    """A retrieval backend (embedding endpoint) failed."""


class TransportError(OneEvalError):
    """HTTP/network failure after retries (or missing offline fixture)."""


class NotFoundError(OneEvalError):
    """Remote object does not exist (drives resolution fallback, not retry)."""


class StructuredOutputError(OneEvalError):
    """LLM never produced schema-valid output within the retry budget."""


class ResolutionError(OneEvalError):
    """All resolution tiers failed for a plan item."""


class ConfigError(OneEvalError):
    """No usable (config, split) pair on a dataset card."""


class MappingError(OneEvalError):
    """Key-mapping inference failed (no input/target candidates)."""


class BenchValidationError(OneEvalError):
    """Resolved benchmark failed row-level validity checks."""


class CorruptDownloadError(OneEvalError):
    """Downloaded rows failed to parse; cache entry was removed."""


class GalleryError(OneEvalError):
    """Gallery file violates the gallery schema."""


class RegistrationError(OneEvalError):
    """Duplicate or invalid metric registration."""


class RecommendationError(OneEvalError):
    """Metric plan references metrics missing from the registry."""


class RunnerError(OneEvalError):
    """Metric runner invoked with unusable inputs."""


class PredictionError(OneEvalError):
    """Per-row failure ratio exceeded the benchmark failure threshold."""


class StateError(OneEvalError):
    """Illegal run-state transition (e.g. decision on a settled checkpoint)."""
