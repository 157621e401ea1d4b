"""Relevancy threshold sweeps, gateway performance statistics, and
dataset-level evaluation."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ..errors import EmptyLog, PromptTooLarge
from ..ranking import build_stats, idf, term_weight, tokenize, Bm25Params
from ..retriever import EmbeddingProvider, HashingEmbedder, tfidf_similarities
from .datasets import QaItem
from .metrics import MetricReport, score_answer

DEFAULT_THRESHOLDS = tuple(round(i * 0.01, 2) for i in range(100))

REPRESENTATIONS = ("tfidf", "bm25", "embedding")


def _cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return float(np.dot(a, b) / (norm_a * norm_b))


def _bm25_vector_similarities(query: str, texts: Sequence[str],
                              params: Bm25Params) -> list[float]:
    """Cosine over term vectors weighted by per-term BM25+ contributions.

    Corpus statistics come from the documents; the query is weighted as
    a pseudo-document of its own length.
    """
    doc_tokens = [tokenize(t) for t in texts]
    stats = build_stats(doc_tokens)
    vocabulary = sorted({t for tokens in doc_tokens for t in tokens} | set(tokenize(query)))
    index = {term: i for i, term in enumerate(vocabulary)}

    def weights_for(tokens: list[str]) -> np.ndarray:
        vector = np.zeros(len(vocabulary))
        counts: dict[str, int] = {}
        for term in tokens:
            counts[term] = counts.get(term, 0) + 1
        for term, tf in counts.items():
            vector[index[term]] = idf(term, stats) * term_weight(tf, len(tokens), stats, params)
        return vector

    query_vec = weights_for(tokenize(query))
    return [_cosine(query_vec, weights_for(tokens)) for tokens in doc_tokens]


def _bm25_raw_similarities(query: str, texts: Sequence[str],
                           params: Bm25Params) -> list[float]:
    """Raw BM25+ scores scaled by the maximum score."""
    from ..ranking import bm25plus_score

    doc_tokens = [tokenize(t) for t in texts]
    stats = build_stats(doc_tokens)
    query_tokens = tokenize(query)
    scores = [bm25plus_score(query_tokens, i, stats, params) for i in range(len(texts))]
    top = max(scores) if scores else 0.0
    if top <= 0:
        return [0.0] * len(scores)
    return [s / top for s in scores]


def _embedding_similarities(query: str, texts: Sequence[str],
                            embedder: EmbeddingProvider) -> list[float]:
    vectors = embedder.embed([query] + list(texts))
    query_vec = np.asarray(vectors[0])
    return [_cosine(query_vec, np.asarray(vectors[i + 1])) for i in range(len(texts))]


@dataclass
class SweepCurves:
    thresholds: list[float]
    curves: dict[str, list[int]]
    similarities: dict[str, list[float]] = field(default_factory=dict)

    def to_csv_rows(self) -> list[tuple[float, str, int]]:
        rows = []
        for representation, counts in self.curves.items():
            for threshold, count in zip(self.thresholds, counts):
                rows.append((threshold, representation, count))
        return rows


def relevancy_sweep(query: str, texts: Sequence[str],
                    representations: Sequence[str] = REPRESENTATIONS,
                    thresholds: Optional[Sequence[float]] = None,
                    embedder: Optional[EmbeddingProvider] = None,
                    bm25_mode: str = "vector",
                    bm25_params: Bm25Params = Bm25Params()) -> SweepCurves:
    """Retained-document counts per similarity threshold and representation."""
    if thresholds is None:
        thresholds = DEFAULT_THRESHOLDS
    thresholds = list(thresholds)
    if any(t < 0 or t > 0.99 for t in thresholds):
        raise ValueError("thresholds must lie within [0, 0.99]")
    if list(thresholds) != sorted(thresholds):
        raise ValueError("thresholds must be ascending")
    if bm25_mode not in ("vector", "raw"):
        raise ValueError(f"unknown bm25_mode {bm25_mode!r}")

    curves: dict[str, list[int]] = {}
    similarities: dict[str, list[float]] = {}
    for representation in representations:
        if representation == "tfidf":
            sims = tfidf_similarities(query, texts)
        elif representation == "bm25":
            if bm25_mode == "vector":
                sims = _bm25_vector_similarities(query, texts, bm25_params)
            else:
                sims = _bm25_raw_similarities(query, texts, bm25_params)
        elif representation == "embedding":
            sims = _embedding_similarities(query, texts, embedder or HashingEmbedder())
        else:
            raise ValueError(f"unknown representation {representation!r}")
        similarities[representation] = sims
        curves[representation] = [sum(1 for s in sims if s >= t) for t in thresholds]
    return SweepCurves(thresholds=thresholds, curves=curves, similarities=similarities)


SKEWNESS_FORMULA = ("adjusted Fisher-Pearson: G1 = g1 * sqrt(n*(n-1)) / (n-2) "
                    "with g1 = m3 / m2**1.5; absent when n < 3 or variance is 0")

P95_FORMULA = "linear interpolation percentile (numpy.percentile, 95)"


def _skewness(values: Sequence[float]) -> Optional[float]:
    n = len(values)
    if n < 3:
        return None
    mean = sum(values) / n
    m2 = sum((v - mean) ** 2 for v in values) / n
    if m2 == 0:
        return None
    m3 = sum((v - mean) ** 3 for v in values) / n
    g1 = m3 / m2 ** 1.5
    return g1 * math.sqrt(n * (n - 1)) / (n - 2)


@dataclass
class PerfStats:
    n: int
    latency_mean: float
    latency_median: float
    latency_p95: float
    latency_skewness: Optional[float]
    docs_mean: float
    docs_median: float
    docs_skewness: Optional[float]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "latency": {
                "mean": self.latency_mean,
                "median": self.latency_median,
                "p95": self.latency_p95,
                "skewness": self.latency_skewness,
            },
            "docs_returned": {
                "mean": self.docs_mean,
                "median": self.docs_median,
                "skewness": self.docs_skewness,
            },
            "formulas": {"skewness": SKEWNESS_FORMULA, "p95": P95_FORMULA},
        }


def perf_stats(log: Sequence[dict]) -> PerfStats:
    """Latency and document-count statistics over telemetry entries."""
    if not log:
        raise EmptyLog("telemetry log has no entries")
    latencies = [float(entry["latency_seconds"]) for entry in log]
    docs = [float(entry["docs_returned"]) for entry in log]
    return PerfStats(
        n=len(log),
        latency_mean=statistics.fmean(latencies),
        latency_median=statistics.median(latencies),
        latency_p95=float(np.percentile(latencies, 95)),
        latency_skewness=_skewness(latencies),
        docs_mean=statistics.fmean(docs),
        docs_median=statistics.median(docs),
        docs_skewness=_skewness(docs),
    )


@dataclass
class ItemReport:
    item: QaItem
    answer: str
    metrics: MetricReport


@dataclass
class EvaluationReport:
    items: list[ItemReport]
    excluded_count: int
    aggregate: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "evaluated": len(self.items),
            "excluded": self.excluded_count,
            "aggregate": self.aggregate,
        }

    def to_csv_rows(self) -> list[dict]:
        rows = []
        for report in self.items:
            row = {"question": report.item.question, "source": report.item.source,
                   "answer": report.answer}
            row.update(report.metrics.to_dict())
            rows.append(row)
        return rows


def _aggregate(reports: list[ItemReport]) -> dict[str, float]:
    if not reports:
        return {}
    keys = ["rouge1_p", "rouge1_r", "rouge1_f", "rougeL_p", "rougeL_r", "rougeL_f",
            "bleu1", "semantic"]
    aggregate = {key: statistics.fmean(getattr(r.metrics, key) for r in reports)
                 for key in keys}
    with_em = [r for r in reports if r.metrics.exact_match is not None]
    if with_em:
        aggregate["exact_match"] = statistics.fmean(r.metrics.exact_match for r in with_em)
    return aggregate


def evaluate_dataset(items: Sequence[QaItem], answer_fn: Callable[[str], str],
                     provider: Optional[EmbeddingProvider] = None) -> EvaluationReport:
    """Answer every question and score it against its ground truth.

    Questions whose answer_fn raises PromptTooLarge are excluded from
    the aggregates and counted; exact match is scored only for the
    comparison flavor.
    """
    if provider is None:
        provider = HashingEmbedder()
    reports: list[ItemReport] = []
    excluded = 0
    for item in items:
        try:
            answer = answer_fn(item.question)
        except PromptTooLarge:
            excluded += 1
            continue
        metrics = score_answer(answer, item.ground_truth, provider,
                               with_exact_match=item.source == "comparison_qa")
        reports.append(ItemReport(item=item, answer=answer, metrics=metrics))
    return EvaluationReport(items=reports, excluded_count=excluded,
                            aggregate=_aggregate(reports))
