"""BM25+ relevance ranking over flattened record text.

The scorer keeps the lower-bound bonus of BM25+: any document actually
containing a query term beats every document that lacks it, no matter
how the document lengths compare.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import EmptyCorpus
from .taxonomy import ScholarlyRecord

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; no stemming, no stopwords."""
    return [m.group(0) for m in _TOKEN.finditer(text.lower())]


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.5
    b: float = 0.75
    delta: float = 1.0

    def __post_init__(self):
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not 0 <= self.b <= 1:
            raise ValueError(f"b must be in [0, 1], got {self.b}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")


@dataclass
class CorpusStats:
    n_docs: int
    df: dict[str, int]
    doc_lengths: list[int]
    avgdl: float
    term_freqs: list[Counter] = field(default_factory=list)


def build_stats(docs: Sequence[Sequence[str]]) -> CorpusStats:
    """Document frequencies and length statistics for a tokenized corpus."""
    if not docs:
        raise EmptyCorpus("need at least one document")
    df: Counter = Counter()
    term_freqs = []
    doc_lengths = []
    for doc in docs:
        freqs = Counter(doc)
        term_freqs.append(freqs)
        doc_lengths.append(len(doc))
        df.update(freqs.keys())
    return CorpusStats(
        n_docs=len(docs),
        df=dict(df),
        doc_lengths=doc_lengths,
        avgdl=sum(doc_lengths) / len(docs),
        term_freqs=term_freqs,
    )


def idf(term: str, stats: CorpusStats) -> float:
    """ln((N - df + 0.5)/(df + 0.5) + 1); the +1 keeps IDF positive."""
    df = stats.df.get(term, 0)
    return math.log((stats.n_docs - df + 0.5) / (df + 0.5) + 1.0)


def term_weight(tf: int, doc_length: int, stats: CorpusStats,
                params: Bm25Params) -> float:
    """Length-normalized term contribution before the IDF factor.

    Zero for absent terms; the delta bonus applies only to occurring
    terms so that tf monotonicity and the lower bound both hold.
    """
    if tf <= 0:
        return 0.0
    ratio = doc_length / stats.avgdl if stats.avgdl > 0 else 1.0
    saturated = (tf * (params.k1 + 1.0)) / (
        tf + params.k1 * (1.0 - params.b + params.b * ratio)
    )
    return saturated + params.delta


def bm25plus_score(query_tokens: Iterable[str], doc_index: int,
                   stats: CorpusStats, params: Bm25Params = Bm25Params()) -> float:
    """BM25+ score of one document for a tokenized query."""
    freqs = stats.term_freqs[doc_index]
    dl = stats.doc_lengths[doc_index]
    score = 0.0
    for term in query_tokens:
        tf = freqs.get(term, 0)
        if tf == 0:
            continue
        score += idf(term, stats) * term_weight(tf, dl, stats, params)
    return score


def rank(query: str, records: Sequence[ScholarlyRecord],
         params: Bm25Params = Bm25Params()) -> list[ScholarlyRecord]:
    """Order records by BM25+ relevance over their flattened text.

    Ties break by title, then source ids, keeping the output
    deterministic for identical scores.
    """
    from .retriever import flatten_record

    if not records:
        return []
    docs = [tokenize(flatten_record(r)) for r in records]
    stats = build_stats(docs)
    query_tokens = tokenize(query)
    scored = [
        (bm25plus_score(query_tokens, i, stats, params), r)
        for i, r in enumerate(records)
    ]
    scored.sort(key=lambda pair: (
        -pair[0], pair[1].title, ",".join(sorted(pair[1].source_ids))
    ))
    return [record for _, record in scored]
