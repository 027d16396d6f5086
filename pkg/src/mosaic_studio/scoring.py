"""Text-similarity providers backing catalog search.

The default provider is purely lexical so search works offline and
deterministically: cosine similarity over lowercased token bags with
sublinear term weighting (1 + ln tf) damped by inverse document frequency.
A remote provider delegates scoring to an embedding service when one is
configured.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Protocol, Sequence

import httpx

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class SimilarityProvider(Protocol):
    def scores(self, query: str, docs: Sequence[str]) -> list[float]:
        """Similarity of the query to each doc, each in [0, 1]."""
        ...


class LexicalProvider:
    """Deterministic offline scorer; no model weights, no network."""

    def scores(self, query: str, docs: Sequence[str]) -> list[float]:
        doc_bags = [Counter(tokenize(doc)) for doc in docs]
        n_docs = len(docs)
        df: Counter[str] = Counter()
        for bag in doc_bags:
            df.update(bag.keys())

        def idf(token: str) -> float:
            return math.log((1 + n_docs) / (1 + df[token])) + 1.0

        def vectorize(bag: Counter[str]) -> dict[str, float]:
            return {tok: (1.0 + math.log(tf)) * idf(tok) for tok, tf in bag.items()}

        query_vec = vectorize(Counter(tokenize(query)))
        query_norm = math.sqrt(sum(w * w for w in query_vec.values()))
        results = []
        for bag in doc_bags:
            doc_vec = vectorize(bag)
            doc_norm = math.sqrt(sum(w * w for w in doc_vec.values()))
            if query_norm == 0 or doc_norm == 0:
                results.append(0.0)
                continue
            dot = sum(w * doc_vec.get(tok, 0.0) for tok, w in query_vec.items())
            results.append(dot / (query_norm * doc_norm))
        return results


class RemoteEmbeddingProvider:
    """Scores via a remote embedding endpoint: POST {texts} -> {vectors}."""

    def __init__(self, endpoint: str, api_key: str | None = None, timeout: float = 30.0):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout

    def _embed(self, texts: Sequence[str]) -> list[list[float]]:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        response = httpx.post(
            self.endpoint, json={"texts": list(texts)}, headers=headers, timeout=self.timeout
        )
        response.raise_for_status()
        return response.json()["vectors"]

    def scores(self, query: str, docs: Sequence[str]) -> list[float]:
        vectors = self._embed([query, *docs])
        query_vec, doc_vecs = vectors[0], vectors[1:]
        return [max(0.0, min(1.0, (_cosine(query_vec, v) + 1.0) / 2.0)) for v in doc_vecs]


def _cosine(a: Sequence[float], b: Sequence[float]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    if na == 0 or nb == 0:
        return 0.0
    return dot / (na * nb)
