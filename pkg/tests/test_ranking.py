"""BM25+ scoring against an independent brute-force oracle."""

import math

import numpy as np
import pytest

from scholarly_gateway.errors import EmptyCorpus
from scholarly_gateway.ranking import (Bm25Params, bm25plus_score, build_stats, idf,
                                       rank, term_weight, tokenize)
from scholarly_gateway.taxonomy import Facet, ScholarlyRecord


def oracle_score(query, docs, doc_index, k1=1.5, b=0.75, delta=1.0):
    """Reference scorer written straight from the formula, no shared state.

    Recomputes document frequencies and lengths from scratch on every
    call so an indexing bug in the implementation cannot hide here.
    """
    n = len(docs)
    lengths = [len(d) for d in docs]
    avgdl = sum(lengths) / n
    doc = docs[doc_index]
    score = 0.0
    for term in query:
        tf = sum(1 for t in doc if t == term)
        if tf == 0:
            continue
        df = sum(1 for d in docs if term in d)
        idf_val = math.log((n - df + 0.5) / (df + 0.5) + 1.0)
        if avgdl > 0:
            norm = k1 * (1.0 - b + b * lengths[doc_index] / avgdl)
        else:
            norm = k1
        score += idf_val * (tf * (k1 + 1.0) / (tf + norm) + delta)
    return score


def random_corpus(rng, max_docs=20, vocab_size=10):
    vocab = [f"w{i}" for i in range(vocab_size)]
    n_docs = int(rng.integers(1, max_docs + 1))
    docs = []
    for _ in range(n_docs):
        length = int(rng.integers(1, 15))
        docs.append([vocab[int(rng.integers(vocab_size))] for _ in range(length)])
    return vocab, docs


class TestTokenize:
    def test_lowercase_and_split(self):
        assert tokenize("Hello, World! 42") == ["hello", "world", "42"]

    def test_underscore_splits(self):
        assert tokenize("snake_case") == ["snake", "case"]

    def test_unicode(self):
        assert tokenize("Café Öl") == ["café", "öl"]

    def test_empty(self):
        assert tokenize("...") == []


class TestParams:
    def test_defaults(self):
        params = Bm25Params()
        assert (params.k1, params.b, params.delta) == (1.5, 0.75, 1.0)

    def test_validation(self):
        with pytest.raises(ValueError):
            Bm25Params(b=1.5)
        with pytest.raises(ValueError):
            Bm25Params(delta=-0.1)


class TestScoring:
    def test_hand_case(self):
        """Two documents, query "a": worked example scores ~1.6235."""
        stats = build_stats([["a", "b", "a"], ["b", "c"]])
        assert bm25plus_score(["a"], 0, stats) == pytest.approx(1.6235, abs=1e-3)
        assert bm25plus_score(["a"], 1, stats) == 0.0

    def test_absent_term_gets_no_delta(self):
        stats = build_stats([["x"], ["y"]])
        assert bm25plus_score(["z"], 0, stats) == 0.0

    def test_single_doc_avgdl_equals_length(self):
        stats = build_stats([["a", "a", "b"]])
        assert stats.avgdl == 3
        assert bm25plus_score(["a"], 0, stats) > 0

    def test_empty_corpus_rejected(self):
        with pytest.raises(EmptyCorpus):
            build_stats([])

    def test_oracle_equivalence(self):
        """Implementation matches the brute-force scorer on random corpora."""
        rng = np.random.default_rng(42)
        for _ in range(100):
            vocab, docs = random_corpus(rng)
            stats = build_stats(docs)
            query = [vocab[int(rng.integers(len(vocab)))]
                     for _ in range(int(rng.integers(1, 5)))]
            for doc_index in range(len(docs)):
                expected = oracle_score(query, docs, doc_index)
                actual = bm25plus_score(query, doc_index, stats)
                assert actual == pytest.approx(expected, abs=1e-9)

    def test_lower_bound_property(self):
        """Any occurrence outscores absence for a positive-IDF term."""
        rng = np.random.default_rng(7)
        trials = 0
        while trials < 1000:
            vocab, docs = random_corpus(rng, max_docs=8)
            stats = build_stats(docs)
            term = vocab[int(rng.integers(len(vocab)))]
            with_term = [i for i, d in enumerate(docs) if term in d]
            without = [i for i, d in enumerate(docs) if term not in d]
            if not with_term or not without:
                continue
            i = with_term[int(rng.integers(len(with_term)))]
            j = without[int(rng.integers(len(without)))]
            assert idf(term, stats) > 0
            score_i = bm25plus_score([term], i, stats)
            score_j = bm25plus_score([term], j, stats)
            assert score_i > score_j == 0.0
            trials += 1

    def test_tf_monotone(self):
        """More occurrences never score lower, lengths held equal."""
        docs = [["a"] * tf + ["b"] * (10 - tf) for tf in range(1, 6)]
        stats = build_stats(docs)
        scores = [bm25plus_score(["a"], i, stats) for i in range(len(docs))]
        assert scores == sorted(scores)


class TestTermWeight:
    def test_zero_tf(self):
        stats = build_stats([["a"]])
        assert term_weight(0, 1, stats, Bm25Params()) == 0.0

    def test_delta_floor(self):
        """The weight of any occurring term stays above delta."""
        stats = build_stats([["a"] * 50, ["b"]])
        weight = term_weight(1, 50, stats, Bm25Params())
        assert weight > 1.0


class TestRank:
    def _record(self, title, abstract=None):
        return ScholarlyRecord(facet=Facet.ARTICLE, title=title, abstract=abstract,
                               source_ids={"s"})

    def test_relevant_record_first(self):
        records = [
            self._record("Cooking pasta at home"),
            self._record("Neural ranking models", "BM25 and neural rankers compared."),
            self._record("Gardening basics"),
        ]
        ranked = rank("neural ranking", records)
        assert ranked[0].title == "Neural ranking models"

    def test_deterministic_tiebreak(self):
        records = [self._record("B title"), self._record("A title")]
        ranked = rank("unrelated query words", records)
        assert [r.title for r in ranked] == ["A title", "B title"]

    def test_empty_input(self):
        assert rank("q", []) == []
