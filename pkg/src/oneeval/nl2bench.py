"""Natural-language request -> approvable benchmark plan.

Intent structuring (LLM with a rule-based fallback), dual-backend candidate
retrieval over the gallery, threshold partitioning into quality/marginal
matches, hub fallback for long-tail coverage, and budget-aware selection
with redundancy pruning.
"""

from __future__ import annotations

import hashlib
import logging
import math
import re
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Optional

from .errors import IntentError, PlanError, RetrievalBackendError, StructuredOutputError, TransportError
from .gallery import Gallery
from .model import BenchmarkPlan, EvalIntent, MatchTier, PlanItem, PlanSource

logger = logging.getLogger(__name__)

EMBEDDING_TAU = 0.5
TFIDF_TAU = 0.3
DEFAULT_K = 5
DEFAULT_KEYWORD_BONUS = 0.1
DEFAULT_BUDGET = 5
MAX_PER_TAG = 2


@dataclass
class RetrievalConfig:
    backend: str = "tfidf"  # "embedding" | "tfidf"
    tau: Optional[float] = None  # default depends on backend
    k: int = DEFAULT_K
    keyword_bonus_weight: float = DEFAULT_KEYWORD_BONUS

    def __post_init__(self):
        if self.backend not in ("embedding", "tfidf"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.tau is None:
            self.tau = EMBEDDING_TAU if self.backend == "embedding" else TFIDF_TAU
        if not 0 < self.tau < 1:
            raise ValueError("tau must be in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 <= self.keyword_bonus_weight <= 0.5:
            raise ValueError("keyword bonus weight must be in [0, 0.5]")


@dataclass
class RankedCandidate:
    entry_ref: str  # gallery id or hub repo id
    score: float
    tier: str = "marginal"  # quality | marginal
    matched_terms: list[str] = field(default_factory=list)


# ---------------------------------------------------------------------------
# Tokenization (mixed CJK/Latin)
# ---------------------------------------------------------------------------

_LATIN_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _is_cjk(ch: str) -> bool:
    return "一" <= ch <= "鿿" or "㐀" <= ch <= "䶿"


def tokenize_mixed(text: str) -> list[str]:
    """Latin runs lowercased and split on non-alphanumerics; each CJK run
    contributes its unigrams followed by its adjacent-pair bigrams."""
    tokens: list[str] = []
    buffer: list[str] = []  # pending latin chars
    cjk_run: list[str] = []

    def flush_latin():
        if buffer:
            tokens.extend(_LATIN_TOKEN_RE.findall("".join(buffer).lower()))
            buffer.clear()

    def flush_cjk():
        if cjk_run:
            tokens.extend(cjk_run)
            tokens.extend(a + b for a, b in zip(cjk_run, cjk_run[1:]))
            cjk_run.clear()

    for ch in unicodedata.normalize("NFKC", text):
        if _is_cjk(ch):
            flush_latin()
            cjk_run.append(ch)
        else:
            flush_cjk()
            buffer.append(ch)
    flush_latin()
    flush_cjk()
    return tokens


# ---------------------------------------------------------------------------
# TF-IDF backend
# ---------------------------------------------------------------------------

@dataclass
class TfidfIndex:
    entry_ids: list[str]
    vectors: list[dict[str, float]]  # L2-normalized tf-idf per document
    token_sets: list[set[str]]
    idf: dict[str, float]
    n_docs: int = 0

    def idf_of(self, token: str) -> float:
        # df = 0 for out-of-corpus tokens, per ln((1+N)/(1+df)) + 1
        return self.idf.get(token, math.log(1 + self.n_docs) + 1.0)


def _l2_normalize(vec: dict[str, float]) -> dict[str, float]:
    norm = math.sqrt(math.fsum(w * w for w in vec.values()))
    if norm == 0:
        return dict(vec)
    return {t: w / norm for t, w in vec.items()}


def build_tfidf_index(gallery: Gallery) -> TfidfIndex:
    """tf = raw count, idf = ln((1+N)/(1+df)) + 1, vectors L2-normalized."""
    if not len(gallery):
        raise ValueError("cannot index an empty gallery")
    docs = [(e.id, tokenize_mixed(e.retrieval_text())) for e in gallery]
    n_docs = len(docs)
    df: dict[str, int] = {}
    for _, tokens in docs:
        for token in set(tokens):
            df[token] = df.get(token, 0) + 1
    idf = {t: math.log((1 + n_docs) / (1 + count)) + 1.0 for t, count in df.items()}

    entry_ids, vectors, token_sets = [], [], []
    for entry_id, tokens in docs:
        tf: dict[str, int] = {}
        for token in tokens:
            tf[token] = tf.get(token, 0) + 1
        vectors.append(_l2_normalize({t: count * idf[t] for t, count in tf.items()}))
        token_sets.append(set(tokens))
        entry_ids.append(entry_id)
    return TfidfIndex(entry_ids=entry_ids, vectors=vectors, token_sets=token_sets, idf=idf, n_docs=n_docs)


def _query_vector(index: TfidfIndex, query_tokens: list[str]) -> dict[str, float]:
    tf: dict[str, int] = {}
    for token in query_tokens:
        tf[token] = tf.get(token, 0) + 1
    return _l2_normalize({t: count * index.idf_of(t) for t, count in tf.items()})


def score_tfidf(index: TfidfIndex, query: str, config: RetrievalConfig) -> list[RankedCandidate]:
    """cosine + keyword-overlap bonus, clamped to [0,1]; zero scores dropped;
    ties broken by lexicographic entry id."""
    query_tokens = tokenize_mixed(query)
    if not query_tokens:
        return []
    qvec = _query_vector(index, query_tokens)
    unique_query = list(dict.fromkeys(query_tokens))
    candidates: list[RankedCandidate] = []
    for entry_id, dvec, tokens in zip(index.entry_ids, index.vectors, index.token_sets):
        cosine = math.fsum(w * dvec.get(t, 0.0) for t, w in qvec.items())
        matched = [t for t in unique_query if t in tokens]
        bonus = config.keyword_bonus_weight * (len(matched) / len(unique_query))
        score = min(max(cosine + bonus, 0.0), 1.0)
        if score > 0:
            candidates.append(RankedCandidate(entry_ref=entry_id, score=score, matched_terms=matched))
    candidates.sort(key=lambda c: (-c.score, c.entry_ref))
    return candidates


def score_texts_tfidf(texts: dict[str, str], query: str, config: RetrievalConfig) -> dict[str, float]:
    """Ad-hoc tf-idf scoring over arbitrary documents (hub search results)."""
    docs = {key: tokenize_mixed(text) for key, text in texts.items()}
    n_docs = max(len(docs), 1)
    df: dict[str, int] = {}
    for tokens in docs.values():
        for token in set(tokens):
            df[token] = df.get(token, 0) + 1
    idf = {t: math.log((1 + n_docs) / (1 + c)) + 1.0 for t, c in df.items()}
    oov_idf = math.log(1 + n_docs) + 1.0
    query_tokens = tokenize_mixed(query)
    if not query_tokens:
        return {key: 0.0 for key in texts}
    qtf: dict[str, int] = {}
    for token in query_tokens:
        qtf[token] = qtf.get(token, 0) + 1
    qvec = _l2_normalize({t: c * idf.get(t, oov_idf) for t, c in qtf.items()})
    unique_query = list(dict.fromkeys(query_tokens))
    out: dict[str, float] = {}
    for key, tokens in docs.items():
        tf: dict[str, int] = {}
        for token in tokens:
            tf[token] = tf.get(token, 0) + 1
        dvec = _l2_normalize({t: c * idf[t] for t, c in tf.items()})
        cosine = math.fsum(w * dvec.get(t, 0.0) for t, w in qvec.items())
        overlap = sum(1 for t in unique_query if t in tokens) / len(unique_query)
        out[key] = min(max(cosine + config.keyword_bonus_weight * overlap, 0.0), 1.0)
    return out


# ---------------------------------------------------------------------------
# Embedding backend
# ---------------------------------------------------------------------------

class HashEmbedder:
    """Deterministic offline embedder: hashed bag-of-tokens, L2-normalized."""

    def __init__(self, dimensions: int = 64):
        self.dimensions = dimensions

    def embed(self, texts: list[str]) -> list[list[float]]:
        out = []
        for text in texts:
            vec = [0.0] * self.dimensions
            for token in tokenize_mixed(text):
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                bucket = int.from_bytes(digest[:4], "big") % self.dimensions
                sign = 1.0 if digest[4] % 2 == 0 else -1.0
                vec[bucket] += sign
            norm = math.sqrt(math.fsum(v * v for v in vec))
            out.append([v / norm for v in vec] if norm else vec)
        return out


def _cosine(a: list[float], b: list[float]) -> float:
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)


def score_embedding(embedder, gallery: Gallery, query: str) -> list[RankedCandidate]:
    """Cosine similarity mapped from [-1,1] to [0,1] via (x+1)/2."""
    entries = list(gallery)
    try:
        vectors = embedder.embed([e.retrieval_text() for e in entries])
        qvec = embedder.embed([query])[0]
    except (TransportError, OSError) as exc:
        raise RetrievalBackendError(f"embedding backend failed: {exc}") from exc
    query_tokens = set(tokenize_mixed(query))
    candidates = []
    for entry, vec in zip(entries, vectors):
        score = (_cosine(qvec, vec) + 1.0) / 2.0
        matched = sorted(query_tokens & set(tokenize_mixed(entry.retrieval_text())))
        candidates.append(RankedCandidate(entry_ref=entry.id, score=min(max(score, 0.0), 1.0), matched_terms=matched))
    candidates.sort(key=lambda c: (-c.score, c.entry_ref))
    return candidates


# ---------------------------------------------------------------------------
# Partitioning and hub fallback
# ---------------------------------------------------------------------------

def partition(ranked: list[RankedCandidate], config: RetrievalConfig) -> tuple[list[RankedCandidate], list[RankedCandidate]]:
    """quality = score >= tau, marginal = 0 < score < tau; order preserved."""
    quality, marginal = [], []
    for c in ranked:
        if c.score >= config.tau:
            c.tier = "quality"
            quality.append(c)
        elif c.score > 0:
            c.tier = "marginal"
            marginal.append(c)
    return quality, marginal


def fallback_search(hub_client, intent: EvalIntent, deficit: int, gallery: Gallery, config: Optional[RetrievalConfig] = None, recorder=None) -> list[PlanItem]:
    """Live hub search to cover the quality-match deficit; never duplicates
    gallery repos; hub unavailability degrades to an empty result."""
    if deficit <= 0:
        return []
    config = config or RetrievalConfig()
    query = " ".join(intent.domains) or intent.preferences
    try:
        results = hub_client.search_datasets(query, limit=max(deficit * 3, 5))
    except TransportError as exc:
        logger.warning("hub fallback search unavailable: %s", exc)
        if recorder:
            recorder({"kind": "hub_search", "query": query, "warning": str(exc), "results": 0})
        return []
    known_repos = {e.canonical_repo.lower() for e in gallery}
    fresh = [(repo, desc, downloads) for repo, desc, downloads in results if repo.lower() not in known_repos]
    scores = score_texts_tfidf({repo: f"{repo} {desc}" for repo, desc, _ in fresh}, query, config)
    fresh = [r for r in fresh if scores.get(r[0], 0.0) > 0]  # same zero-filter as gallery ranking
    ranked = sorted(fresh, key=lambda r: (-scores.get(r[0], 0.0), r[0]))
    items = [
        PlanItem(
            display_name=repo,
            canonical_id=None,
            source=PlanSource.HUB,
            relevance_score=scores.get(repo, 0.0),
            match_tier=MatchTier.MARGINAL,
            justification=f"hub search for {query!r}: {desc[:80]}",
        )
        for repo, desc, _ in ranked[:deficit]
    ]
    if recorder:
        recorder({"kind": "hub_search", "query": query, "results": len(results), "kept": len(items)})
    return items


# ---------------------------------------------------------------------------
# Intent structuring
# ---------------------------------------------------------------------------

_INTENT_SCHEMA = {
    "type": "object",
    "properties": {
        "domains": {"type": "array", "items": {"type": "string"}},
        "explicit_benchmarks": {"type": "array", "items": {"type": "string"}},
        "constraints": {"type": "object"},
        "preferences": {"type": "string"},
    },
    "required": ["domains"],
}

# keyword families for the rule-based fallback
_KEYWORD_DOMAINS: list[tuple[str, str]] = [
    (r"math|arithmetic|algebra|calculus|数学", "math"),
    (r"code|coding|program|software|代码", "code"),
    (r"safety|harmful|toxic|jailbreak|安全", "safety"),
    (r"reason|logic|commonsense|inference|推理", "reasoning"),
    (r"knowledge|general|language|text|知识", "text"),
    (r"retriev|\brag\b|search|lookup", "retrieval"),
    (r"fact|truthful|trivia|\bqa\b", "factual-qa"),
]

_QUOTED_RE = re.compile(r"[\"'`]([^\"'`]{2,64})[\"'`]")


def _fallback_intent(request_text: str, gallery: Optional[Gallery]) -> EvalIntent:
    lowered = request_text.lower()
    domains: list[str] = []
    for pattern, domain in _KEYWORD_DOMAINS:
        if re.search(pattern, lowered) and domain not in domains:
            domains.append(domain)
    explicit: list[str] = []
    for quoted in _QUOTED_RE.findall(request_text):
        if quoted.strip() and quoted.strip() not in explicit:
            explicit.append(quoted.strip())
    if gallery is not None:
        for raw_word in re.findall(r"[\w./-]+", request_text):
            entry = gallery.lookup(raw_word)
            if entry is not None:
                if raw_word not in explicit:
                    explicit.append(raw_word)
                for tag in entry.category_tags:
                    if tag not in domains:
                        domains.append(tag)
    return EvalIntent(domains=domains, explicit_benchmarks=explicit, constraints={}, preferences=request_text)


def structure_intent(request_text: str, llm=None, gallery: Optional[Gallery] = None, recorder=None) -> EvalIntent:
    """LLM-structured intent with a keyword-family fallback.

    An intent with no domains and no explicit benchmarks is a structuring
    failure (the highly-ambiguous-query case) and raises IntentError.
    """
    if not request_text.strip():
        raise IntentError("empty evaluation request")
    intent: Optional[EvalIntent] = None
    if llm is not None:
        from .llm import ChatMessage, ChatRequest, chat

        prompt = (
            "TASK: intent_structuring\n"
            "Convert the evaluation request into a structured intent with fields "
            "domains (capability tags such as text, reasoning, math, code, safety, retrieval, factual-qa), "
            "explicit_benchmarks (benchmark names the user spelled out), "
            "constraints (language, max_benchmarks, max_samples_per_benchmark, format), "
            "and preferences (free text).\n"
            f"Request: {request_text}\n"
            "Reply as JSON."
        )
        request = ChatRequest(messages=[ChatMessage("user", prompt)], response_schema=_INTENT_SCHEMA)
        try:
            response = chat(llm, request, recorder=recorder)
            data = response.parsed or {}
            intent = EvalIntent(
                domains=[d for d in data.get("domains", []) if isinstance(d, str) and d.strip()],
                explicit_benchmarks=[b.strip() for b in data.get("explicit_benchmarks", []) if isinstance(b, str) and b.strip()],
                constraints=dict(data.get("constraints", {})),
                preferences=data.get("preferences", request_text),
            )
        except (StructuredOutputError, TransportError) as exc:
            logger.info("intent structuring via LLM failed (%s); applying keyword fallback", exc)
    if intent is None:
        intent = _fallback_intent(request_text, gallery)
    if not intent.domains and not intent.explicit_benchmarks:
        raise IntentError(f"request could not be decomposed into domains or benchmarks: {request_text!r}")
    if not intent.domains and gallery is not None:
        for name in intent.explicit_benchmarks:
            entry = gallery.lookup(name)
            if entry:
                intent.domains.extend(t for t in entry.category_tags if t not in intent.domains)
    if not intent.domains:
        intent.domains = ["text"]
    try:
        intent.validate()
    except ValueError as exc:
        raise IntentError(f"structured intent is invalid: {exc}") from exc
    return intent


# ---------------------------------------------------------------------------
# Selection under constraints
# ---------------------------------------------------------------------------

def retrieval_query(intent: EvalIntent) -> str:
    return " ".join(intent.domains) + " " + intent.preferences


def constraint_int(intent: EvalIntent, key: str, default: int, minimum: int = 0) -> int:
    """Constraint values come from LLM output; tolerate junk."""
    try:
        value = int(intent.constraints.get(key, default))
    except (TypeError, ValueError):
        return default
    return max(value, minimum)


def candidates_to_items(ranked: list[RankedCandidate], gallery: Gallery) -> list[PlanItem]:
    items = []
    for c in ranked:
        entry = gallery.lookup(c.entry_ref)
        if entry is None:
            continue
        matched = ", ".join(c.matched_terms[:4]) or "tag affinity"
        items.append(
            PlanItem(
                display_name=entry.id,
                canonical_id=entry.canonical_repo,
                source=PlanSource.GALLERY,
                relevance_score=c.score,
                match_tier=MatchTier.QUALITY if c.tier == "quality" else MatchTier.MARGINAL,
                justification=f"{c.tier} match on {matched} (score {c.score:.2f})",
                category_tags=list(entry.category_tags),
            )
        )
    return items


def select_plan(
    pool: list[PlanItem],
    intent: EvalIntent,
    config: Optional[RetrievalConfig] = None,
    gallery: Optional[Gallery] = None,
    precheck: Optional[Callable[[PlanItem], tuple[bool, str]]] = None,
    recorder=None,
) -> BenchmarkPlan:
    """Forced user benchmarks first, then descending score with at most
    MAX_PER_TAG items per category tag, within the budget."""
    budget = constraint_int(intent, "max_benchmarks", DEFAULT_BUDGET, minimum=1)
    seen_ids: set[str] = set()
    selected: list[PlanItem] = []
    tag_counts: dict[str, int] = {}

    def key_of(item: PlanItem) -> str:
        return (item.canonical_id or item.display_name).lower()

    # user-specified benchmarks are forced into the plan, resolved via the
    # gallery when possible
    for name in intent.explicit_benchmarks:
        if len(selected) >= budget:
            break
        entry = gallery.lookup(name) if gallery else None
        item = PlanItem(
            display_name=name,
            canonical_id=entry.canonical_repo if entry else None,
            source=PlanSource.USER,
            relevance_score=1.0,
            match_tier=MatchTier.FORCED,
            justification="named explicitly in the request",
            category_tags=list(entry.category_tags) if entry else [],
        )
        if key_of(item) in seen_ids:
            continue
        seen_ids.add(key_of(item))
        selected.append(item)
        for tag in item.category_tags:
            tag_counts[tag] = tag_counts.get(tag, 0) + 1

    dropped: list[dict[str, str]] = []
    for item in sorted(pool, key=lambda i: (-i.relevance_score, i.display_name)):
        if len(selected) >= budget:
            break
        if key_of(item) in seen_ids:
            continue
        if precheck is not None:
            ok, reason = precheck(item)
            if not ok:
                dropped.append({"item": item.display_name, "reason": reason})
                continue
        if any(tag_counts.get(tag, 0) >= MAX_PER_TAG for tag in item.category_tags):
            dropped.append({"item": item.display_name, "reason": f"redundant: already {MAX_PER_TAG} benchmarks per tag"})
            continue
        seen_ids.add(key_of(item))
        selected.append(item)
        for tag in item.category_tags:
            tag_counts[tag] = tag_counts.get(tag, 0) + 1

    if recorder and dropped:
        recorder({"kind": "selection_pruning", "dropped": dropped})
    if not selected:
        raise PlanError("no benchmark survived selection; plan is empty")
    plan = BenchmarkPlan(items=selected, intent_snapshot=intent, budget=budget)
    plan.validate()
    return plan
