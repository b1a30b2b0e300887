"""Provider-agnostic LLM access for the planner/judge and the subject model.

One OpenAI-compatible chat-completions client serves both roles; a scripted
mock keyed on prompt substrings gives deterministic CI without network.
"""

from __future__ import annotations

import json
import logging
import os
import re
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Optional

import httpx
import jsonschema

from .errors import PredictionError, StructuredOutputError, TransportError

logger = logging.getLogger(__name__)

DEFAULT_RETRY_LIMIT = 2
DEFAULT_TEMPERATURE = 0.0  # planner calls must be reproducible
DEFAULT_MAX_TOKENS = 1024
PREDICTION_FAILURE_RATIO = 0.5

Recorder = Callable[[dict[str, Any]], None]


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def validate(self) -> None:
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"unknown role {self.role!r}")


@dataclass
class ChatRequest:
    messages: list[ChatMessage]
    response_schema: Optional[dict] = None
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS

    def validate(self) -> None:
        if not self.messages:
            raise ValueError("at least one message required")
        for m in self.messages:
            m.validate()
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")

    def prompt_text(self) -> str:
        return "\n".join(m.content for m in self.messages)


@dataclass
class ChatResponse:
    text: str
    parsed: Optional[Any] = None
    prompt_tokens: int = 0
    completion_tokens: int = 0
    attempts: int = 1


@dataclass
class RawCompletion:
    text: str
    prompt_tokens: int
    completion_tokens: int


class HttpChatClient:
    """OpenAI-compatible chat-completions client."""

    def __init__(self, base_url: str, api_key: str = "", model: str = "default", timeout: float = 120.0, transport=None):
        self.base_url = base_url.rstrip("/")
        self.model = model
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(base_url=self.base_url, headers=headers, timeout=timeout, transport=transport)

    def complete(self, request: ChatRequest) -> RawCompletion:
        body = {
            "model": self.model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        try:
            response = self._client.post("/chat/completions", json=body)
            response.raise_for_status()
        except httpx.HTTPError as exc:
            raise TransportError(f"chat completion failed: {exc}") from exc
        data = response.json()
        usage = data.get("usage", {})
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError) as exc:
            raise TransportError(f"malformed completion payload: {exc}") from exc
        return RawCompletion(
            text=text,
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
        )


class ScriptedLLM:
    """Deterministic mock driven by a JSON script.

    Entries are ``{match, response, prompt_tokens?, completion_tokens?}``.
    Specific (substring) matches are consumed in script order, then
    unconsumed ``"*"`` entries; once everything matching is consumed the
    last matching entry replays forever.  Give each request kind a unique
    key for stable replay across rollbacks.
    """

    def __init__(self, entries: list[dict[str, Any]]):
        for entry in entries:
            if "match" not in entry or "response" not in entry:
                raise ValueError("script entries need 'match' and 'response'")
        self.entries = entries
        self._consumed = [False] * len(entries)
        self._lock = threading.Lock()
        self.calls = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedLLM":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(json.load(fh))

    def complete(self, request: ChatRequest) -> RawCompletion:
        text = request.prompt_text()
        with self._lock:
            self.calls += 1
            index = self._pick(text)
            if index is None:
                raise TransportError("scripted LLM has no entry matching the request")
            entry = self.entries[index]
            self._consumed[index] = True
        response = entry["response"]
        return RawCompletion(
            text=response,
            prompt_tokens=int(entry.get("prompt_tokens", max(1, len(text) // 4))),
            completion_tokens=int(entry.get("completion_tokens", max(1, len(response) // 4))),
        )

    def _pick(self, text: str) -> Optional[int]:
        specific = [i for i, e in enumerate(self.entries) if e["match"] != "*" and e["match"] in text]
        wildcard = [i for i, e in enumerate(self.entries) if e["match"] == "*"]
        for i in specific:
            if not self._consumed[i]:
                return i
        for i in wildcard:
            if not self._consumed[i]:
                return i
        # everything matching is consumed: replay the most specific match
        if specific:
            return specific[-1]
        if wildcard:
            return wildcard[-1]
        return None


# ---------------------------------------------------------------------------
# Structured-output chat with retries
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```(?:json)?\s*(.*?)```", re.DOTALL)
_CORRECTIVE = "The previous reply was not valid JSON for the required schema. Reply with JSON only, no prose."


def extract_json_value(text: str) -> Optional[Any]:
    """Best-effort extraction of a JSON value from model text."""
    candidates = [text.strip()]
    candidates.extend(m.strip() for m in _FENCE_RE.findall(text))
    for opener, closer in (("{", "}"), ("[", "]")):
        start = text.find(opener)
        end = text.rfind(closer)
        if start != -1 and end > start:
            candidates.append(text[start : end + 1])
    for candidate in candidates:
        try:
            return json.loads(candidate)
        except json.JSONDecodeError:
            continue
    return None


def chat(
    client,
    request: ChatRequest,
    retry_limit: int = DEFAULT_RETRY_LIMIT,
    recorder: Optional[Recorder] = None,
) -> ChatResponse:
    """One logical call with schema validation and corrective retries.

    Every attempt (including failed ones) is reported to ``recorder`` so
    token accounting reflects actual spend.
    """
    request.validate()
    messages = list(request.messages)
    total_attempts = 1 + max(0, retry_limit)
    last_error: Optional[Exception] = None

    for attempt in range(1, total_attempts + 1):
        attempt_request = ChatRequest(
            messages=messages,
            response_schema=request.response_schema,
            temperature=request.temperature,
            max_tokens=request.max_tokens,
        )
        try:
            raw = client.complete(attempt_request)
        except TransportError as exc:
            last_error = exc
            if recorder:
                recorder({"attempt": attempt, "ok": False, "error": str(exc), "prompt_tokens": 0, "completion_tokens": 0})
            continue

        parsed = None
        schema_ok = True
        if request.response_schema is not None:
            parsed = extract_json_value(raw.text)
            if parsed is None:
                schema_ok = False
            else:
                try:
                    jsonschema.validate(parsed, request.response_schema)
                except jsonschema.ValidationError:
                    schema_ok = False
                    parsed = None
        if recorder:
            recorder(
                {
                    "attempt": attempt,
                    "ok": schema_ok,
                    "prompt_tokens": raw.prompt_tokens,
                    "completion_tokens": raw.completion_tokens,
                }
            )
        if schema_ok:
            return ChatResponse(
                text=raw.text,
                parsed=parsed,
                prompt_tokens=raw.prompt_tokens,
                completion_tokens=raw.completion_tokens,
                attempts=attempt,
            )
        last_error = StructuredOutputError("response did not satisfy the schema")
        messages = messages + [ChatMessage("user", _CORRECTIVE)]

    if isinstance(last_error, TransportError):
        raise last_error
    raise StructuredOutputError(f"schema never satisfied after {total_attempts} attempts")


# ---------------------------------------------------------------------------
# Subject-model prediction batches
# ---------------------------------------------------------------------------

@dataclass
class Prediction:
    index: int
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    error: Optional[str] = None


def generate_predictions(
    model_client,
    rows: list[dict[str, Any]],
    template: str,
    parallelism: int = 1,
    failure_ratio: float = PREDICTION_FAILURE_RATIO,
    recorder: Optional[Recorder] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> list[Prediction]:
    """Prompt the subject model for every row; output order matches input order.

    Per-row failures become empty predictions with an error flag; the batch
    only fails when the failure ratio exceeds ``failure_ratio``.
    """
    for row in rows:
        if not str(row.get("input", "")).strip():
            raise ValueError(f"row {row.get('index')} has an empty input")

    def one(position: int, row: dict[str, Any]) -> Prediction:
        prompt = template.format(**{k: row.get(k, "") for k in ("input", "choices_block")})
        request = ChatRequest(messages=[ChatMessage("user", prompt)], max_tokens=max_tokens)
        try:
            raw = model_client.complete(request)
            return Prediction(
                index=position,
                text=raw.text,
                prompt_tokens=raw.prompt_tokens,
                completion_tokens=raw.completion_tokens,
            )
        except TransportError as exc:
            return Prediction(index=position, text="", error=str(exc))

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(one, i, row) for i, row in enumerate(rows)]
            predictions = [f.result() for f in futures]
    else:
        predictions = [one(i, row) for i, row in enumerate(rows)]

    if recorder:
        for p in predictions:
            recorder(
                {
                    "row": p.index,
                    "ok": p.error is None,
                    "prompt_tokens": p.prompt_tokens,
                    "completion_tokens": p.completion_tokens,
                }
            )
    failures = sum(1 for p in predictions if p.error)
    if rows and failures / len(rows) > failure_ratio:
        raise PredictionError(f"{failures}/{len(rows)} predictions failed (threshold {failure_ratio})")
    return predictions


# ---------------------------------------------------------------------------
# Client construction from CLI/env specs
# ---------------------------------------------------------------------------

ENV_LLM_BASE_URL = "ONEEVAL_LLM_BASE_URL"
ENV_LLM_API_KEY = "ONEEVAL_LLM_API_KEY"
ENV_MODEL_BASE_URL = "ONEEVAL_MODEL_BASE_URL"
ENV_MODEL_API_KEY = "ONEEVAL_MODEL_API_KEY"


def client_from_spec(spec: Optional[str], role: str) -> Optional[object]:
    """Build a client from ``mock:<script-path>``, a URL, or role env vars."""
    if spec is None:
        env_url = os.environ.get(ENV_LLM_BASE_URL if role == "llm" else ENV_MODEL_BASE_URL)
        if not env_url:
            return None
        key = os.environ.get(ENV_LLM_API_KEY if role == "llm" else ENV_MODEL_API_KEY, "")
        return HttpChatClient(env_url, api_key=key)
    if spec.startswith("mock:"):
        return ScriptedLLM.from_file(spec[len("mock:"):])
    key = os.environ.get(ENV_LLM_API_KEY if role == "llm" else ENV_MODEL_API_KEY, "")
    return HttpChatClient(spec, api_key=key)
