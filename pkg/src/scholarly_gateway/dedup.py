"""Duplicate detection and merging for normalized records.

Attribute-wise similarity (title, authors, abstract, date, with DOI as
a trump card) feeds a union-find transitive closure; each resulting
cluster is merged into one representative record by deterministic
field-level rules.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Sequence

from .errors import MixedFacetCluster
from .ranking import tokenize
from .taxonomy import ScholarlyRecord

#: Score assigned when both DOIs are present and differ; distinct DOIs
#: almost always mean distinct works, but metadata errors exist.
DOI_MISMATCH_CAP = 0.5


@dataclass(frozen=True)
class SimilarityWeights:
    title: float = 0.45
    authors: float = 0.25
    abstract: float = 0.20
    date: float = 0.10
    merge_threshold: float = 0.85

    def __post_init__(self):
        parts = (self.title, self.authors, self.abstract, self.date)
        if any(w < 0 for w in parts):
            raise ValueError("weights must be nonnegative")
        if abs(sum(parts) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(parts)}")
        if not 0 < self.merge_threshold <= 1:
            raise ValueError(f"merge_threshold must be in (0, 1], got {self.merge_threshold}")


@dataclass
class DuplicateCluster:
    members: list[int]
    representative: ScholarlyRecord


def _jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def _title_trigrams(title: str) -> set[str]:
    text = " ".join(tokenize(title))
    if len(text) < 3:
        return {text} if text else set()
    return {text[i:i + 3] for i in range(len(text) - 2)}


def _author_key(name: str) -> str:
    """Collapse a name to an initials-insensitive key.

    "A. Smith" and "Alice Smith" both become "a smith"; a lone token is
    kept whole.
    """
    tokens = tokenize(name)
    if not tokens:
        return ""
    if len(tokens) == 1:
        return tokens[0]
    return f"{tokens[0][0]} {' '.join(tokens[1:])}"


def _author_keys(record: ScholarlyRecord) -> set[str]:
    return {key for key in (_author_key(n) for n in record.authors) if key}


def pair_similarity(a: ScholarlyRecord, b: ScholarlyRecord,
                    weights: SimilarityWeights = SimilarityWeights()) -> float:
    """Symmetric similarity in [0, 1].

    Equal DOIs short-circuit to 1.0; unequal DOIs cap the attribute
    score at 0.5.  Components undefined on either side (missing
    abstract, date, or author list) drop out and their weight is
    redistributed proportionally over the rest.
    """
    if a.facet != b.facet:
        return 0.0
    if a.doi and b.doi:
        if a.doi == b.doi:
            return 1.0
        cap = DOI_MISMATCH_CAP
    else:
        cap = 1.0

    components: list[tuple[float, float]] = [
        (weights.title, _jaccard(_title_trigrams(a.title), _title_trigrams(b.title)))
    ]
    if a.authors and b.authors:
        components.append((weights.authors, _jaccard(_author_keys(a), _author_keys(b))))
    if a.abstract and b.abstract:
        components.append(
            (weights.abstract,
             _jaccard(set(tokenize(a.abstract)), set(tokenize(b.abstract))))
        )
    if a.date_published is not None and b.date_published is not None:
        same_year = a.date_published.year == b.date_published.year
        components.append((weights.date, 1.0 if same_year else 0.0))

    total_weight = sum(w for w, _ in components)
    score = sum(w * s for w, s in components) / total_weight
    return min(score, cap)


def _title_block_key(record: ScholarlyRecord) -> str:
    return " ".join(tokenize(record.title))[:4]


def candidate_pairs(records: Sequence[ScholarlyRecord]) -> list[tuple[int, int]]:
    """Blocked candidate generation to avoid full pairwise comparison.

    Records share a block when they agree on (facet, first four
    characters of the normalized title) or on normalized DOI.
    """
    blocks: dict[tuple, list[int]] = {}
    for i, record in enumerate(records):
        blocks.setdefault(("title", record.facet, _title_block_key(record)), []).append(i)
        if record.doi:
            blocks.setdefault(("doi", record.doi), []).append(i)
    pairs = set()
    for members in blocks.values():
        for pos, i in enumerate(members):
            for j in members[pos + 1:]:
                pairs.add((min(i, j), max(i, j)))
    return sorted(pairs)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int):
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def cluster(records: Sequence[ScholarlyRecord],
            scored_pairs: Sequence[tuple[int, int, float]],
            threshold: float) -> list[DuplicateCluster]:
    """Transitive closure over pairs at or above the threshold.

    Unmatched records become singleton clusters; clusters are ordered by
    their smallest member index.
    """
    uf = _UnionFind(len(records))
    for i, j, score in scored_pairs:
        if score >= threshold:
            uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(len(records)):
        groups.setdefault(uf.find(i), []).append(i)
    return [
        DuplicateCluster(members=members, representative=merge_cluster([records[i] for i in members]))
        for _, members in sorted(groups.items())
    ]


def _merge_order_key(record: ScholarlyRecord) -> tuple[str, str]:
    return (",".join(sorted(record.source_ids)), record.title)


def merge_cluster(members: Sequence[ScholarlyRecord]) -> ScholarlyRecord:
    """Merge cluster members into one record.

    Member order is canonicalized first, so the result does not depend
    on how the cluster was discovered.
    """
    if not members:
        raise ValueError("cluster members must be nonempty")
    facets = {m.facet for m in members}
    if len(facets) > 1:
        raise MixedFacetCluster(f"cluster spans facets {sorted(f.value for f in facets)}")
    ordered = sorted(members, key=_merge_order_key)
    if len(ordered) == 1:
        only = ordered[0]
        return replace(only, authors=list(only.authors),
                       source_ids=set(only.source_ids), extras=dict(only.extras))

    title = max((m.title for m in ordered), key=len)
    abstracts = [m.abstract for m in ordered if m.abstract]
    abstract = max(abstracts, key=len) if abstracts else None

    authors: list[str] = []
    seen_keys: set[str] = set()
    for member in ordered:
        for name in member.authors:
            key = _author_key(name)
            if key not in seen_keys:
                seen_keys.add(key)
                authors.append(name)

    dois = sorted(m.doi for m in ordered if m.doi)
    dated = [m for m in ordered if m.date_published is not None]
    earliest = min(dated, key=lambda m: m.date_published) if dated else None

    urls = [m.url for m in ordered if m.url]
    extras: dict[str, str] = {}
    for member in ordered:
        for key, value in member.extras.items():
            extras.setdefault(key, value)

    source_ids = set()
    for member in ordered:
        source_ids |= member.source_ids

    return ScholarlyRecord(
        facet=ordered[0].facet,
        title=title,
        abstract=abstract,
        authors=authors,
        date_published=earliest.date_published if earliest else None,
        year_only=earliest.year_only if earliest else False,
        doi=dois[0] if dois else None,
        url=urls[0] if urls else None,
        source_ids=source_ids,
        extras=extras,
    )


def find_clusters(records: Sequence[ScholarlyRecord],
                  weights: SimilarityWeights = SimilarityWeights()) -> list[DuplicateCluster]:
    pairs = candidate_pairs(records)
    scored = [(i, j, pair_similarity(records[i], records[j], weights)) for i, j in pairs]
    return cluster(records, scored, weights.merge_threshold)


def deduplicate(records: Sequence[ScholarlyRecord],
                weights: SimilarityWeights = SimilarityWeights()) -> list[ScholarlyRecord]:
    """Full resolve-and-merge pass; output order follows first appearance."""
    return [c.representative for c in find_clusters(records, weights)]
