"""Intent structuring, retrieval backends, partitioning, and plan selection."""

from __future__ import annotations

import json
import math

import pytest
from hypothesis import given, settings, strategies as st

from oneeval.errors import IntentError, PlanError
from oneeval.gallery import Gallery, GalleryEntry, load_gallery
from oneeval.llm import ScriptedLLM
from oneeval.model import EvalIntent, KeyMapping, MatchTier, PlanItem, PlanSource, TaskType
from oneeval.nl2bench import (
    HashEmbedder,
    RankedCandidate,
    RetrievalConfig,
    build_tfidf_index,
    candidates_to_items,
    fallback_search,
    partition,
    retrieval_query,
    score_embedding,
    score_tfidf,
    select_plan,
    structure_intent,
    tokenize_mixed,
)

from oracles.tfidf_oracle import brute_force_scores


def make_entry(entry_id: str, description: str, tags=("text",), repo=None) -> GalleryEntry:
    return GalleryEntry(
        id=entry_id,
        canonical_repo=repo or f"org/{entry_id}",
        aliases=[],
        category_tags=list(tags),
        task_type=TaskType.GENERATION,
        description=description,
        hf_config="default",
        eval_split="test",
        key_mapping=KeyMapping(input_key="question", target_key="answer"),
    )


class TestTokenizer:
    def test_latin_lowercase_split(self):
        assert tokenize_mixed("Math Reasoning-QA") == ["math", "reasoning", "qa"]

    def test_cjk_unigrams_and_bigrams(self):
        # hand enumeration: 4 unigrams then 3 adjacent bigrams
        assert tokenize_mixed("数学推理") == ["数", "学", "推", "理", "数学", "学推", "推理"]

    def test_empty(self):
        assert tokenize_mixed("") == []

    def test_digits_kept(self):
        assert tokenize_mixed("top 500 problems") == ["top", "500", "problems"]

    def test_mixed_text(self):
        tokens = tokenize_mixed("评估math能力")
        assert "math" in tokens and "评" in tokens and "评估" in tokens


class TestTfidf:
    CORPORA = [
        {"A": "math word problems", "B": "code generation tasks", "C": "commonsense question answering"},
        {"A": "general knowledge exam", "B": "knowledge of history", "C": "trivia quiz night", "D": "physics problems"},
        {"X": "translate english to french", "Y": "french grammar drills"},
        {"P": "safety red teaming prompts", "Q": "harmless chit chat", "R": "toxic content detection", "S": "math", "T": "poetry"},
        {"M": "数学推理 problems", "N": "中文 text quality", "O": "code 代码 review"},
    ]
    QUERIES = ["math problems", "knowledge quiz", "french translation", "safety toxic prompts", "数学 problems"]

    def corpus_gallery(self, corpus: dict[str, str]) -> Gallery:
        return Gallery([make_entry(k.lower(), v) for k, v in corpus.items()])

    @pytest.mark.parametrize("corpus,query", list(zip(CORPORA, QUERIES)))
    def test_engine_matches_brute_force_oracle(self, corpus, query):
        config = RetrievalConfig(backend="tfidf")
        gallery = self.corpus_gallery(corpus)
        index = build_tfidf_index(gallery)
        ranked = {c.entry_ref: c.score for c in score_tfidf(index, query, config)}
        docs = {e.id: tokenize_mixed(e.retrieval_text()) for e in gallery}
        oracle = brute_force_scores(docs, tokenize_mixed(query), config.keyword_bonus_weight)
        for entry_id, oracle_score in oracle.items():
            if oracle_score > 0:
                assert ranked[entry_id] == pytest.approx(oracle_score, abs=1e-9)
            else:
                assert entry_id not in ranked

    def test_top_hit_hand_computed(self):
        config = RetrievalConfig(backend="tfidf")
        gallery = self.corpus_gallery(self.CORPORA[0])
        ranked = score_tfidf(build_tfidf_index(gallery), "math problems", config)
        assert ranked[0].entry_ref == "a"
        docs = {e.id: tokenize_mixed(e.retrieval_text()) for e in gallery}
        oracle = brute_force_scores(docs, ["math", "problems"], 0.1)
        assert ranked[0].score == pytest.approx(oracle["a"], abs=1e-9)

    def test_self_similarity_ranks_first(self):
        gallery = self.corpus_gallery(self.CORPORA[1])
        ranked = score_tfidf(build_tfidf_index(gallery), "general knowledge exam", RetrievalConfig(backend="tfidf"))
        assert ranked[0].entry_ref == "a"

    def test_no_overlap_empty_ranking(self):
        gallery = self.corpus_gallery(self.CORPORA[0])
        assert score_tfidf(build_tfidf_index(gallery), "zzzz", RetrievalConfig(backend="tfidf")) == []

    def test_ties_broken_lexicographically(self):
        gallery = Gallery([make_entry("b", "twin description"), make_entry("a", "twin description")])
        ranked = score_tfidf(build_tfidf_index(gallery), "twin", RetrievalConfig(backend="tfidf"))
        assert [c.entry_ref for c in ranked] == ["a", "b"]


class TestEmbedding:
    def test_identical_text_scores_one(self):
        gallery = Gallery([make_entry("a", "math word problems")])
        ranked = score_embedding(HashEmbedder(), gallery, gallery.entries[0].retrieval_text())
        assert ranked[0].score == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_vectors_score_half(self):
        class StubEmbedder:
            def embed(self, texts):
                return [[1.0, 0.0] if "query" in t else [0.0, 1.0] for t in texts]

        gallery = Gallery([make_entry("a", "doc text")])
        ranked = score_embedding(StubEmbedder(), gallery, "query text")
        assert ranked[0].score == pytest.approx(0.5, abs=1e-12)

    def test_ranking_matches_cosine_argsort(self):
        import random

        rng = random.Random(7)
        vectors = {f"e{i}": [rng.uniform(-1, 1) for _ in range(8)] for i in range(10)}
        qvec = [rng.uniform(-1, 1) for _ in range(8)]

        class FixedEmbedder:
            def embed(self, texts):
                out = []
                for t in texts:
                    key = t.split()[0]
                    out.append(vectors.get(key, qvec))
                return out

        gallery = Gallery([make_entry(k, f"{k} filler") for k in vectors])
        ranked = score_embedding(FixedEmbedder(), gallery, "the query")

        def cosine(a, b):
            dot = sum(x * y for x, y in zip(a, b))
            return dot / (math.sqrt(sum(x * x for x in a)) * math.sqrt(sum(y * y for y in b)))

        oracle = sorted(vectors, key=lambda k: (-(cosine(qvec, vectors[k]) + 1) / 2, k))
        assert [c.entry_ref for c in ranked] == oracle


class TestEmbeddingFailure:
    def test_transport_failure_is_backend_error(self, gallery_path):
        from oneeval.errors import RetrievalBackendError, TransportError

        class DeadEmbedder:
            def embed(self, texts):
                raise TransportError("endpoint unreachable")

        gallery = load_gallery(gallery_path)
        with pytest.raises(RetrievalBackendError):
            score_embedding(DeadEmbedder(), gallery, "math problems")


class TestPartition:
    def ranked(self, scores):
        return [RankedCandidate(entry_ref=f"e{i}", score=s) for i, s in enumerate(scores)]

    def test_embedding_tau_example(self):
        config = RetrievalConfig(backend="embedding")
        quality, marginal = partition(self.ranked([0.7, 0.55, 0.4]), config)
        assert [c.score for c in quality] == [0.7, 0.55]
        assert [c.score for c in marginal] == [0.4]

    def test_tfidf_tau_example(self):
        config = RetrievalConfig(backend="tfidf")
        quality, marginal = partition(self.ranked([0.35, 0.25]), config)
        assert [c.score for c in quality] == [0.35]
        assert [c.score for c in marginal] == [0.25]

    def test_all_zero(self):
        quality, marginal = partition(self.ranked([0.0, 0.0]), RetrievalConfig(backend="tfidf"))
        assert quality == [] and marginal == []

    @given(st.lists(st.floats(0, 1), max_size=30), st.floats(0.05, 0.95))
    @settings(max_examples=200, deadline=None)
    def test_tier_semantics_property(self, scores, tau):
        scores = sorted(scores, reverse=True)
        config = RetrievalConfig(backend="tfidf", tau=tau)
        quality, marginal = partition(self.ranked(scores), config)
        for c in quality:
            assert c.score >= tau and c.tier == "quality"
        for c in marginal:
            assert 0 < c.score < tau and c.tier == "marginal"

    @given(st.lists(st.floats(0, 1), max_size=30), st.floats(0.05, 0.45), st.floats(0.05, 0.5))
    @settings(max_examples=200, deadline=None)
    def test_raising_tau_never_grows_quality(self, scores, tau, bump):
        scores = sorted(scores, reverse=True)
        low = partition(self.ranked(scores), RetrievalConfig(backend="tfidf", tau=tau))[0]
        high = partition(self.ranked(scores), RetrievalConfig(backend="tfidf", tau=min(tau + bump, 0.99)))[0]
        assert len(high) <= len(low)
        assert {c.entry_ref for c in high} <= {c.entry_ref for c in low}


class FixtureHub:
    def __init__(self, results):
        self.results = results
        self.queries = []

    def search_datasets(self, query, limit=10):
        self.queries.append(query)
        return self.results[:limit]


class TestFallbackSearch:
    def gallery(self, gallery_path):
        return load_gallery(gallery_path)

    def test_deficit_zero_skips_hub(self, gallery_path):
        hub = FixtureHub([("org/x", "desc", 1)])
        items = fallback_search(hub, EvalIntent(domains=["math"]), 0, self.gallery(gallery_path))
        assert items == [] and hub.queries == []

    def test_deficit_caps_results(self, gallery_path):
        results = [(f"org/math-{i}", "math problems set", 10 + i) for i in range(10)]
        hub = FixtureHub(results)
        items = fallback_search(hub, EvalIntent(domains=["math"]), 2, self.gallery(gallery_path))
        assert len(items) <= 2
        assert all(i.source is PlanSource.HUB for i in items)

    def test_never_duplicates_gallery_repos(self, gallery_path):
        gallery = self.gallery(gallery_path)
        results = [("openai/gsm8k", "math problems", 100), ("fresh/math-new", "math problems", 5)]
        items = fallback_search(FixtureHub(results), EvalIntent(domains=["math"]), 5, gallery)
        assert all(item.display_name != "openai/gsm8k" for item in items)

    def test_hub_unavailable_degrades_to_empty(self, gallery_path):
        from oneeval.errors import TransportError

        class DeadHub:
            def search_datasets(self, query, limit=10):
                raise TransportError("offline")

        warnings = []
        items = fallback_search(DeadHub(), EvalIntent(domains=["math"]), 3, self.gallery(gallery_path), recorder=warnings.append)
        assert items == [] and warnings and "warning" in warnings[0]


class TestStructureIntent:
    def test_llm_path(self, gallery_path):
        gallery = load_gallery(gallery_path)
        llm = ScriptedLLM([
            {"match": "intent_structuring", "response": json.dumps({
                "domains": ["text", "reasoning"], "explicit_benchmarks": [], "constraints": {}, "preferences": "broad"})},
        ])
        intent = structure_intent("broad general-knowledge coverage with light reasoning", llm=llm, gallery=gallery)
        assert set(intent.domains) >= {"text", "reasoning"}

    def test_dead_llm_keyword_fallback_with_benchmark_name(self, gallery_path):
        gallery = load_gallery(gallery_path)
        intent = structure_intent("evaluate on GSM8K only", llm=ScriptedLLM([]), gallery=gallery)
        assert "math" in intent.domains
        assert "GSM8K" in intent.explicit_benchmarks

    def test_ambiguous_request_fails(self, gallery_path):
        gallery = load_gallery(gallery_path)
        with pytest.raises(IntentError):
            structure_intent("asdf qwerty", llm=ScriptedLLM([]), gallery=gallery)

    def test_quoted_names_copied(self, gallery_path):
        gallery = load_gallery(gallery_path)
        intent = structure_intent("please run 'my-custom-set' on math", llm=None, gallery=gallery)
        assert "my-custom-set" in intent.explicit_benchmarks

    def test_invalid_llm_constraints_are_intent_error(self, gallery_path):
        gallery = load_gallery(gallery_path)
        llm = ScriptedLLM([{
            "match": "intent_structuring",
            "response": json.dumps({"domains": ["math"], "constraints": {"max_benchmarks": 0}}),
        }])
        with pytest.raises(IntentError):
            structure_intent("evaluate some math", llm=llm, gallery=gallery)


class TestConstraintInt:
    def test_junk_values_fall_back_to_default(self):
        from oneeval.nl2bench import constraint_int

        intent = EvalIntent(domains=["math"], constraints={"max_benchmarks": "five"})
        assert constraint_int(intent, "max_benchmarks", 5, minimum=1) == 5
        intent = EvalIntent(domains=["math"], constraints={"max_benchmarks": -2})
        assert constraint_int(intent, "max_benchmarks", 5, minimum=1) == 1
        intent = EvalIntent(domains=["math"], constraints={"max_benchmarks": "3"})
        assert constraint_int(intent, "max_benchmarks", 5, minimum=1) == 3


class TestSelectPlan:
    def pool_item(self, name, score, tags, source=PlanSource.GALLERY):
        return PlanItem(
            display_name=name, canonical_id=f"org/{name}", source=source,
            relevance_score=score, match_tier=MatchTier.QUALITY, category_tags=tags,
        )

    def test_redundancy_rule_two_per_tag(self):
        pool = [self.pool_item(f"math{i}", 0.9 - i * 0.1, ["math"]) for i in range(4)]
        pool += [self.pool_item(f"other{i}", 0.5 - i * 0.1, ["text"]) for i in range(3)]
        plan = select_plan(pool, EvalIntent(domains=["math"]), RetrievalConfig())
        names = [i.display_name for i in plan.items]
        assert names[:2] == ["math0", "math1"]
        assert sum(1 for n in names if n.startswith("math")) == 2
        assert len(names) == 4  # 2 math + 2 text allowed

    def test_pool_of_eight_keeps_top2_math_plus_top3_others(self):
        pool = [self.pool_item(f"math{i}", 0.95 - i * 0.02, ["math"]) for i in range(4)]
        pool += [self.pool_item(f"other{i}", 0.6 - i * 0.05, [f"tag{i}"]) for i in range(4)]
        plan = select_plan(pool, EvalIntent(domains=["math"], constraints={"max_benchmarks": 5}), RetrievalConfig())
        names = [i.display_name for i in plan.items]
        assert len(names) == 5
        assert names[:2] == ["math0", "math1"]
        assert names[2:] == ["other0", "other1", "other2"]

    def test_budget_respected(self):
        pool = [self.pool_item(f"e{i}", 0.9 - i * 0.05, [f"tag{i}"]) for i in range(10)]
        intent = EvalIntent(domains=["text"], constraints={"max_benchmarks": 3})
        plan = select_plan(pool, intent, RetrievalConfig())
        assert len(plan.items) == 3 and plan.budget == 3

    def test_explicit_benchmark_forced(self, gallery_path):
        gallery = load_gallery(gallery_path)
        pool = [self.pool_item("e0", 0.9, ["text"])]
        intent = EvalIntent(domains=["math"], explicit_benchmarks=["GSM8K"])
        plan = select_plan(pool, intent, RetrievalConfig(), gallery=gallery)
        forced = [i for i in plan.items if i.match_tier is MatchTier.FORCED]
        assert forced and forced[0].canonical_id == "openai/gsm8k"
        assert forced[0].source is PlanSource.USER

    def test_precheck_drops_items_with_reason(self):
        pool = [self.pool_item("good", 0.9, ["a"]), self.pool_item("bad", 0.8, ["b"])]
        dropped = []
        plan = select_plan(
            pool,
            EvalIntent(domains=["text"]),
            RetrievalConfig(),
            precheck=lambda i: (i.display_name != "bad", "failed pre-check"),
            recorder=dropped.append,
        )
        assert [i.display_name for i in plan.items] == ["good"]
        assert dropped and dropped[0]["dropped"][0]["item"] == "bad"

    def test_empty_pool_is_plan_error(self):
        with pytest.raises(PlanError):
            select_plan([], EvalIntent(domains=["text"]), RetrievalConfig())

    def test_forced_items_never_evicted_within_budget(self, gallery_path):
        gallery = load_gallery(gallery_path)
        pool = [self.pool_item(f"e{i}", 0.99, ["text"]) for i in range(6)]
        intent = EvalIntent(domains=["text"], explicit_benchmarks=["mmlu", "gsm8k"], constraints={"max_benchmarks": 3})
        plan = select_plan(pool, intent, RetrievalConfig(), gallery=gallery)
        forced_names = {i.display_name for i in plan.items if i.match_tier is MatchTier.FORCED}
        assert forced_names == {"mmlu", "gsm8k"}
        assert len(plan.items) == 3


class TestCaseStudyRanking:
    def test_case_study_plan_is_the_paper_five(self, gallery_path):
        gallery = load_gallery(gallery_path)
        intent = EvalIntent(domains=["text", "reasoning"], preferences="broad general-knowledge coverage; light reasoning")
        config = RetrievalConfig(backend="tfidf")
        ranked = score_tfidf(build_tfidf_index(gallery), retrieval_query(intent), config)
        quality, marginal = partition(ranked, config)
        plan = select_plan(candidates_to_items(quality + marginal, gallery), intent, config, gallery=gallery)
        assert {i.canonical_id for i in plan.items} == {
            "cais/mmlu", "truthful_qa", "commonsenseqa", "openai/gsm8k", "HuggingFaceH4/MATH-500",
        }
