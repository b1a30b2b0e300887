"""Brute-force tf-idf + keyword-bonus oracle, independent of the engine.

Direct formula evaluation per document, no index structures:
tf = raw count, idf = ln((1+N)/(1+df)) + 1, L2-normalized vectors,
score = cos(q, d) + alpha * |matched| / |query tokens|, clamped to [0, 1].
"""

import math


def brute_force_scores(docs: dict[str, list[str]], query_tokens: list[str], alpha: float) -> dict[str, float]:
    n = len(docs)
    vocabulary = set(query_tokens)
    for tokens in docs.values():
        vocabulary |= set(tokens)

    def df(term):
        return sum(1 for tokens in docs.values() if term in tokens)

    idf = {t: math.log((1 + n) / (1 + df(t))) + 1.0 for t in vocabulary}

    def weight_vector(tokens):
        return {t: tokens.count(t) * idf[t] for t in set(tokens)}

    def norm(vec):
        return math.sqrt(sum(w * w for w in vec.values()))

    q_vec = weight_vector(query_tokens)
    q_norm = norm(q_vec)
    unique_query = list(dict.fromkeys(query_tokens))
    scores = {}
    for doc_id, tokens in docs.items():
        d_vec = weight_vector(tokens)
        d_norm = norm(d_vec)
        if q_norm == 0 or d_norm == 0:
            cosine = 0.0
        else:
            cosine = sum(q_vec.get(t, 0.0) * d_vec.get(t, 0.0) for t in vocabulary) / (q_norm * d_norm)
        overlap = sum(1 for t in unique_query if t in tokens) / len(unique_query) if unique_query else 0.0
        scores[doc_id] = min(max(cosine + alpha * overlap, 0.0), 1.0)
    return scores
