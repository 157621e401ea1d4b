"""Relevancy sweeps, performance statistics, and dataset evaluation."""

import math

import numpy as np
import pytest

from scholarly_gateway.errors import EmptyLog, PromptTooLarge
from scholarly_gateway.evalkit.analysis import (DEFAULT_THRESHOLDS, PerfStats,
                                                evaluate_dataset, perf_stats,
                                                relevancy_sweep)
from scholarly_gateway.evalkit.datasets import QaItem
from scholarly_gateway.retriever import HashingEmbedder

CORPUS = [
    "federated search across scholarly sources",
    "bm25 ranking for scholarly retrieval",
    "question answering over retrieved documents",
    "kinect gesture dataset with depth frames",
    "metadata deduplication via fuzzy matching",
    "unrelated cooking recipes and kitchen tips",
]

QUERY = "scholarly search ranking"


def log_entry(latency, docs):
    return {"latency_seconds": latency, "docs_returned": docs}


class TestRelevancySweep:
    def test_default_threshold_grid(self):
        assert len(DEFAULT_THRESHOLDS) == 100
        assert DEFAULT_THRESHOLDS[0] == 0.0
        assert DEFAULT_THRESHOLDS[-1] == 0.99

    def test_curves_non_increasing(self):
        curves = relevancy_sweep(QUERY, CORPUS).curves
        assert set(curves) == {"tfidf", "bm25", "embedding"}
        for counts in curves.values():
            assert len(counts) == 100
            for earlier, later in zip(counts, counts[1:]):
                assert later <= earlier

    def test_threshold_zero_full_for_nonnegative(self):
        curves = relevancy_sweep(QUERY, CORPUS).curves
        assert curves["tfidf"][0] == len(CORPUS)
        assert curves["bm25"][0] == len(CORPUS)

    def test_raw_mode_peaks_at_one(self):
        result = relevancy_sweep(QUERY, CORPUS, representations=("bm25",),
                                 bm25_mode="raw")
        sims = result.similarities["bm25"]
        assert max(sims) == pytest.approx(1.0)
        assert all(0.0 <= s <= 1.0 + 1e-12 for s in sims)
        assert result.curves["bm25"][0] == len(CORPUS)

    def test_modes_differ(self):
        vector = relevancy_sweep(QUERY, CORPUS, representations=("bm25",))
        raw = relevancy_sweep(QUERY, CORPUS, representations=("bm25",), bm25_mode="raw")
        assert vector.similarities["bm25"] != raw.similarities["bm25"]

    def test_threshold_validation(self):
        with pytest.raises(ValueError):
            relevancy_sweep(QUERY, CORPUS, thresholds=[0.5, 0.2])
        with pytest.raises(ValueError):
            relevancy_sweep(QUERY, CORPUS, thresholds=[-0.1, 0.5])
        with pytest.raises(ValueError):
            relevancy_sweep(QUERY, CORPUS, thresholds=[0.5, 1.0])

    def test_unknown_mode_and_representation(self):
        with pytest.raises(ValueError):
            relevancy_sweep(QUERY, CORPUS, bm25_mode="scaled")
        with pytest.raises(ValueError):
            relevancy_sweep(QUERY, CORPUS, representations=("lsa",))

    def test_csv_rows_cover_grid(self):
        result = relevancy_sweep(QUERY, CORPUS, thresholds=[0.0, 0.5])
        rows = result.to_csv_rows()
        assert len(rows) == 2 * 3
        assert {r[1] for r in rows} == {"tfidf", "bm25", "embedding"}
        assert all(isinstance(r[2], int) for r in rows)

    def test_counts_match_similarities(self):
        result = relevancy_sweep(QUERY, CORPUS, thresholds=[0.0, 0.25, 0.75])
        for representation, sims in result.similarities.items():
            for threshold, count in zip(result.thresholds, result.curves[representation]):
                assert count == sum(1 for s in sims if s >= threshold)


class TestPerfStats:
    def test_positive_skew_on_synthetic_log(self):
        stats = perf_stats([log_entry(1, 1), log_entry(1, 1), log_entry(10, 10)])
        assert stats.latency_skewness == pytest.approx(math.sqrt(3), abs=1e-9)
        assert stats.docs_skewness == pytest.approx(math.sqrt(3), abs=1e-9)
        assert stats.latency_skewness > 0

    def test_central_stats(self):
        stats = perf_stats([log_entry(1, 5), log_entry(2, 7), log_entry(3, 9),
                            log_entry(4, 11)])
        assert stats.n == 4
        assert stats.latency_mean == pytest.approx(2.5)
        assert stats.latency_median == pytest.approx(2.5)
        assert stats.latency_p95 == pytest.approx(np.percentile([1, 2, 3, 4], 95))
        assert stats.docs_mean == pytest.approx(8.0)

    def test_short_log_has_no_skewness(self):
        stats = perf_stats([log_entry(2, 3), log_entry(4, 5)])
        assert stats.latency_skewness is None
        assert stats.docs_skewness is None

    def test_constant_log_has_no_skewness(self):
        stats = perf_stats([log_entry(2, 6)] * 5)
        assert stats.latency_skewness is None
        assert stats.latency_mean == 2.0

    def test_empty_log_raises(self):
        with pytest.raises(EmptyLog):
            perf_stats([])

    def test_to_dict_documents_formulas(self):
        payload = perf_stats([log_entry(1, 1), log_entry(1, 2), log_entry(10, 3)]).to_dict()
        assert "Fisher-Pearson" in payload["formulas"]["skewness"]
        assert "percentile" in payload["formulas"]["p95"]
        assert payload["latency"]["skewness"] == pytest.approx(math.sqrt(3), abs=1e-9)
        assert isinstance(payload, dict) and payload["n"] == 3


def ai_item(question, truth):
    return QaItem(question=question, ground_truth=truth, source="ai_qa")


def comparison_item(question, truth):
    return QaItem(question=question, ground_truth=truth, source="comparison_qa")


class TestEvaluateDataset:
    def test_echoed_truth_scores_one(self):
        items = [ai_item("q1", "alpha beta gamma"), ai_item("q2", "delta epsilon")]
        truths = {i.question: i.ground_truth for i in items}
        report = evaluate_dataset(items, lambda q: truths[q])
        assert report.excluded_count == 0
        assert report.aggregate["rouge1_f"] == pytest.approx(1.0)
        assert report.aggregate["rougeL_f"] == pytest.approx(1.0)
        assert report.aggregate["bleu1"] == pytest.approx(1.0)
        assert report.aggregate["semantic"] == pytest.approx(1.0)
        assert "exact_match" not in report.aggregate

    def test_exact_match_only_for_comparison_items(self):
        items = [ai_item("a", "the answer"), comparison_item("b", "the answer")]
        report = evaluate_dataset(items, lambda q: "The answer.")
        by_source = {r.item.source: r.metrics for r in report.items}
        assert by_source["ai_qa"].exact_match is None
        assert by_source["comparison_qa"].exact_match == 1
        assert report.aggregate["exact_match"] == pytest.approx(1.0)

    def test_disjoint_answer_scores_zero(self):
        report = evaluate_dataset([ai_item("q", "completely different words")],
                                  lambda q: "I don't know.")
        metrics = report.items[0].metrics
        assert metrics.rouge1_f == 0.0
        assert metrics.rougeL_f == 0.0
        assert metrics.bleu1 == 0.0

    def test_prompt_too_large_excluded(self):
        def answer_fn(question):
            if question == "big":
                raise PromptTooLarge("context cannot fit")
            return "fine"

        items = [ai_item("big", "truth a"), ai_item("small", "fine")]
        report = evaluate_dataset(items, answer_fn)
        assert report.excluded_count == 1
        assert len(report.items) == 1
        assert report.to_dict() == {"evaluated": 1, "excluded": 1,
                                    "aggregate": report.aggregate}

    def test_csv_rows_one_per_item(self):
        items = [ai_item("q1", "alpha"), comparison_item("q2", "beta")]
        report = evaluate_dataset(items, lambda q: "alpha")
        rows = report.to_csv_rows()
        assert len(rows) == 2
        assert {"question", "source", "answer"} <= set(rows[0])
        assert "exact_match" in rows[1] and "exact_match" not in rows[0]

    def test_custom_provider_used(self):
        class OnesEmbedder:
            def embed(self, texts):
                return np.ones((len(texts), 4))

        report = evaluate_dataset([ai_item("q", "anything")], lambda q: "other words",
                                  provider=OnesEmbedder())
        assert report.items[0].metrics.semantic == pytest.approx(1.0)
