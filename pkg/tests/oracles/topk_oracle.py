"""Brute-force cosine top-k oracle: full sort, no index machinery."""

from __future__ import annotations

import math


def cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def brute_force_top_k(entries, query, k):
    """entries: iterable of (doc_id, vector). Returns [(doc_id, score)] of length <= k."""
    scored = [(doc_id, cosine(vec, query)) for doc_id, vec in entries]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:k]
