"""Answer-quality metrics: ROUGE-1, ROUGE-L, BLEU-1, sentence-embedding
cosine, and a normalized exact match."""

from __future__ import annotations

import string
from collections import Counter
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..ranking import tokenize
from ..retriever import EmbeddingProvider

_ARTICLES = {"a", "an", "the"}

_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


@dataclass(frozen=True)
class MetricReport:
    rouge1_p: float
    rouge1_r: float
    rouge1_f: float
    rougeL_p: float
    rougeL_r: float
    rougeL_f: float
    bleu1: float
    semantic: float
    exact_match: Optional[int] = None

    def to_dict(self) -> dict:
        payload = {
            "rouge1_p": self.rouge1_p, "rouge1_r": self.rouge1_r, "rouge1_f": self.rouge1_f,
            "rougeL_p": self.rougeL_p, "rougeL_r": self.rougeL_r, "rougeL_f": self.rougeL_f,
            "bleu1": self.bleu1, "semantic": self.semantic,
        }
        if self.exact_match is not None:
            payload["exact_match"] = self.exact_match
        return payload


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _clipped_overlap(candidate: list[str], reference: list[str]) -> int:
    cand_counts = Counter(candidate)
    ref_counts = Counter(reference)
    return sum(min(count, ref_counts[token]) for token, count in cand_counts.items())


def rouge1(candidate: str, reference: str) -> tuple[float, float, float]:
    """Unigram precision/recall/F1 with multiset clipping."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0, 0.0, 0.0
    overlap = _clipped_overlap(cand, ref)
    precision = overlap / len(cand)
    recall = overlap / len(ref)
    return precision, recall, _f1(precision, recall)


def _lcs_length(a: list[str], b: list[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rougeL(candidate: str, reference: str) -> tuple[float, float, float]:
    """Longest-common-subsequence precision/recall/F1 over tokens."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand or not ref:
        return 0.0, 0.0, 0.0
    lcs = _lcs_length(cand, ref)
    precision = lcs / len(cand)
    recall = lcs / len(ref)
    return precision, recall, _f1(precision, recall)


def bleu1(candidate: str, reference: str) -> float:
    """Clipped unigram precision scaled by the brevity penalty."""
    cand = tokenize(candidate)
    ref = tokenize(reference)
    if not cand:
        return 0.0
    precision = _clipped_overlap(cand, ref) / len(cand)
    c, r = len(cand), len(ref)
    brevity = 1.0 if c > r else float(np.exp(1 - r / c))
    return brevity * precision


def semantic_score(candidate: str, reference: str, provider: EmbeddingProvider) -> float:
    """Cosine between provider embeddings; a zero vector on either side gives 0."""
    vectors = provider.embed([candidate, reference])
    a, b = np.asarray(vectors[0], dtype=np.float64), np.asarray(vectors[1], dtype=np.float64)
    norm_a, norm_b = np.linalg.norm(a), np.linalg.norm(b)
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return float(np.dot(a, b) / (norm_a * norm_b))


def normalize_answer(text: str) -> str:
    """Lowercase, drop punctuation and articles, collapse whitespace."""
    lowered = text.lower().translate(_PUNCT_TABLE)
    tokens = [t for t in lowered.split() if t not in _ARTICLES]
    return " ".join(tokens)


def exact_match(candidate: str, reference: str) -> int:
    return 1 if normalize_answer(candidate) == normalize_answer(reference) else 0


def score_answer(candidate: str, reference: str, provider: EmbeddingProvider,
                 with_exact_match: bool = False) -> MetricReport:
    r1 = rouge1(candidate, reference)
    rl = rougeL(candidate, reference)
    return MetricReport(
        rouge1_p=r1[0], rouge1_r=r1[1], rouge1_f=r1[2],
        rougeL_p=rl[0], rougeL_r=rl[1], rougeL_f=rl[2],
        bleu1=bleu1(candidate, reference),
        semantic=semantic_score(candidate, reference, provider),
        exact_match=exact_match(candidate, reference) if with_exact_match else None,
    )
