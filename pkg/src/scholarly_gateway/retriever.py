"""Retrieval over a per-query knowledge base.

Deduplicated records are flattened to text documents, embedded, and
served by three retrievers (TF-IDF, cosine KNN, an exemplar SVM) whose
rankings are fused with weighted reciprocal rank fusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Protocol, Sequence

import httpx
import numpy as np

from .errors import EmptyCorpus, ProviderFailure
from .ranking import tokenize
from .taxonomy import ScholarlyRecord

EMBEDDING_DIM = 512

_FNV64_OFFSET = 0xCBF29CE484222325
_FNV64_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def _fnv1a_64(data: bytes) -> int:
    value = _FNV64_OFFSET
    for byte in data:
        value = ((value ^ byte) * _FNV64_PRIME) & _MASK64
    return value


def _fnv1_64(data: bytes) -> int:
    value = _FNV64_OFFSET
    for byte in data:
        value = ((value * _FNV64_PRIME) & _MASK64) ^ byte
    return value


def flatten_record(record: ScholarlyRecord) -> str:
    """Render a record as labeled lines; extras follow in sorted key order."""
    lines = [f"type: {record.facet.value}", f"title: {record.title}"]
    if record.authors:
        lines.append(f"authors: {', '.join(record.authors)}")
    date_text = record.date_text()
    if date_text:
        lines.append(f"date: {date_text}")
    if record.doi:
        lines.append(f"doi: {record.doi}")
    if record.abstract:
        lines.append(f"abstract: {record.abstract}")
    for key in sorted(record.extras):
        value = record.extras[key]
        if isinstance(value, (list, tuple)):
            value = ", ".join(str(v) for v in value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> np.ndarray:
        """Return one L2-normalized row per input text."""


class HashingEmbedder:
    """Deterministic local embeddings via signed feature hashing.

    Token unigrams and bigrams are hashed into a fixed number of buckets
    (FNV-1a picks the bucket, FNV-1 parity picks the sign) and the
    resulting count vector is L2-normalized.  No fitted state, so any
    two processes agree on every vector.
    """

    def __init__(self, dim: int = EMBEDDING_DIM):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = dim

    def _features(self, text: str) -> list[str]:
        tokens = tokenize(text)
        features = list(tokens)
        features.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
        return features

    def embed_one(self, text: str) -> np.ndarray:
        vector = np.zeros(self.dim, dtype=np.float64)
        for feature in self._features(text):
            data = feature.encode("utf-8")
            bucket = _fnv1a_64(data) % self.dim
            sign = 1.0 if _fnv1_64(data) % 2 == 0 else -1.0
            vector[bucket] += sign
        norm = np.linalg.norm(vector)
        if norm > 0:
            vector /= norm
        return vector

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        if not texts:
            return np.zeros((0, self.dim), dtype=np.float64)
        return np.stack([self.embed_one(t) for t in texts])


class RemoteEmbedder:
    """Embeddings from an HTTP endpoint speaking {"texts": [...]}."""

    def __init__(self, endpoint: str, api_key: Optional[str] = None,
                 timeout: float = 30.0, client: Optional[httpx.Client] = None):
        self.endpoint = endpoint
        self.api_key = api_key
        self.timeout = timeout
        self._client = client

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {"texts": list(texts)}
        try:
            if self._client is not None:
                response = self._client.post(self.endpoint, json=payload,
                                             headers=headers, timeout=self.timeout)
            else:
                response = httpx.post(self.endpoint, json=payload,
                                      headers=headers, timeout=self.timeout)
            response.raise_for_status()
            vectors = response.json()["vectors"]
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise ProviderFailure(f"embedding request failed: {exc}") from exc
        matrix = np.asarray(vectors, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(texts):
            raise ProviderFailure(
                f"embedding response shape {matrix.shape} does not match {len(texts)} texts")
        return matrix


@dataclass
class Document:
    doc_id: int
    text: str
    record: ScholarlyRecord


@dataclass
class KnowledgeBase:
    documents: list[Document]
    embeddings: np.ndarray

    def __len__(self) -> int:
        return len(self.documents)

    def texts(self) -> list[str]:
        return [d.text for d in self.documents]


def build_kb(records: Sequence[ScholarlyRecord],
             embedder: Optional[EmbeddingProvider] = None) -> KnowledgeBase:
    if not records:
        raise EmptyCorpus("cannot build a knowledge base from zero records")
    if embedder is None:
        embedder = HashingEmbedder()
    documents = [Document(doc_id=i, text=flatten_record(r), record=r)
                 for i, r in enumerate(records)]
    embeddings = embedder.embed([d.text for d in documents])
    return KnowledgeBase(documents=documents, embeddings=embeddings)


def _top_k(scores: dict[int, float], k: int) -> list[tuple[int, float]]:
    ordered = sorted(scores.items(), key=lambda item: (-item[1], item[0]))
    return ordered[:k]


def tfidf_similarities(query: str, texts: Sequence[str]) -> list[float]:
    """Cosine over tf-idf vectors; idf = ln(N / (1 + df)) + 1 with raw tf."""
    n = len(texts)
    doc_tokens = [tokenize(t) for t in texts]
    df: dict[str, int] = {}
    for tokens in doc_tokens:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1
    idf = {term: math.log(n / (1 + count)) + 1.0 for term, count in df.items()}

    query_vec: dict[str, float] = {}
    for term in tokenize(query):
        if term in idf:
            query_vec[term] = query_vec.get(term, 0.0) + 1.0
    for term in query_vec:
        query_vec[term] *= idf[term]
    query_norm = math.sqrt(sum(v * v for v in query_vec.values()))

    similarities: list[float] = []
    for tokens in doc_tokens:
        tf: dict[str, int] = {}
        for term in tokens:
            tf[term] = tf.get(term, 0) + 1
        doc_norm_sq = sum((count * idf[term]) ** 2 for term, count in tf.items())
        dot = sum(weight * tf.get(term, 0) * idf[term]
                  for term, weight in query_vec.items())
        if query_norm > 0 and doc_norm_sq > 0:
            similarities.append(dot / (query_norm * math.sqrt(doc_norm_sq)))
        else:
            similarities.append(0.0)
    return similarities


def tfidf_retrieve(query: str, kb: KnowledgeBase, top_k: int) -> list[tuple[int, float]]:
    similarities = tfidf_similarities(query, kb.texts())
    return _top_k(dict(enumerate(similarities)), top_k)


def _embed_query(query: str, kb: KnowledgeBase,
                 embedder: Optional[EmbeddingProvider]) -> np.ndarray:
    if embedder is None:
        embedder = HashingEmbedder(dim=kb.embeddings.shape[1])
    return embedder.embed([query])[0]


def knn_retrieve(query: str, kb: KnowledgeBase, top_k: int,
                 embedder: Optional[EmbeddingProvider] = None) -> list[tuple[int, float]]:
    """Cosine similarity between the query embedding and each document."""
    query_vec = _embed_query(query, kb, embedder)
    query_norm = np.linalg.norm(query_vec)
    scores: dict[int, float] = {}
    for doc_id in range(len(kb)):
        doc_vec = kb.embeddings[doc_id]
        doc_norm = np.linalg.norm(doc_vec)
        if query_norm > 0 and doc_norm > 0:
            scores[doc_id] = float(np.dot(query_vec, doc_vec) / (query_norm * doc_norm))
        else:
            scores[doc_id] = 0.0
    return _top_k(scores, top_k)


SVM_LEARNING_RATE = 0.1
SVM_ITERATIONS = 200
SVM_L2 = 0.01


def svm_retrieve(query: str, kb: KnowledgeBase, top_k: int,
                 embedder: Optional[EmbeddingProvider] = None) -> list[tuple[int, float]]:
    """Rank documents by margin to an exemplar classifier.

    The query embedding is the lone positive; every document is a
    negative.  A linear model with squared-hinge loss and an L2 penalty
    is fit by full-batch gradient descent from zero weights for a fixed
    iteration count, so the outcome is deterministic.
    """
    query_vec = _embed_query(query, kb, embedder)
    x = np.vstack([query_vec[None, :], kb.embeddings])
    y = np.full(x.shape[0], -1.0)
    y[0] = 1.0
    n = x.shape[0]

    w = np.zeros(x.shape[1], dtype=np.float64)
    b = 0.0
    for _ in range(SVM_ITERATIONS):
        margins = y * (x @ w + b)
        slack = np.maximum(0.0, 1.0 - margins)
        coef = -2.0 * y * slack
        grad_w = (coef @ x) / n + 2.0 * SVM_L2 * w
        grad_b = float(np.sum(coef)) / n
        w -= SVM_LEARNING_RATE * grad_w
        b -= SVM_LEARNING_RATE * grad_b

    decision = kb.embeddings @ w + b
    scores = {doc_id: float(decision[doc_id]) for doc_id in range(len(kb))}
    return _top_k(scores, top_k)


@dataclass(frozen=True)
class EnsembleConfig:
    tfidf_weight: float = 0.3
    knn_weight: float = 0.3
    svm_weight: float = 0.4
    top_k: int = 5
    rrf_constant: float = 60.0
    fusion: str = "rrf"

    def __post_init__(self):
        if self.fusion not in ("rrf", "score_sum"):
            raise ValueError(f"unknown fusion mode {self.fusion!r}")
        if self.top_k <= 0:
            raise ValueError(f"top_k must be positive, got {self.top_k}")
        if self.rrf_constant <= 0:
            raise ValueError(f"rrf_constant must be positive, got {self.rrf_constant}")


def fuse_rankings(component_rankings: Sequence[tuple[float, Sequence[tuple[int, float]]]],
                  config: EnsembleConfig) -> dict[int, float]:
    """Weighted fusion of per-component rankings into one score per doc.

    In rrf mode each appearance contributes weight / (constant + rank)
    with ranks starting at 1; in score_sum mode the raw component score
    is used instead of the rank transform.
    """
    fused: dict[int, float] = {}
    for weight, ranking in component_rankings:
        for rank, (doc_id, score) in enumerate(ranking, start=1):
            if config.fusion == "rrf":
                contribution = weight / (config.rrf_constant + rank)
            else:
                contribution = weight * score
            fused[doc_id] = fused.get(doc_id, 0.0) + contribution
    return fused


def ensemble_retrieve(query: str, kb: KnowledgeBase,
                      config: EnsembleConfig = EnsembleConfig(),
                      embedder: Optional[EmbeddingProvider] = None) -> list[tuple[int, float]]:
    """Fuse the three component retrievers over a widened candidate pool."""
    pool = 2 * config.top_k
    components = [
        (config.tfidf_weight, tfidf_retrieve(query, kb, pool)),
        (config.knn_weight, knn_retrieve(query, kb, pool, embedder)),
        (config.svm_weight, svm_retrieve(query, kb, pool, embedder)),
    ]
    fused = fuse_rankings(components, config)
    return _top_k(fused, config.top_k)
