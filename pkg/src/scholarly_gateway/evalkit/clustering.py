"""Seeded k-means over document embeddings.

Initialization is k-means++ driven by a numpy Generator; Lloyd
iterations run to an assignment fixpoint (or a hard cap), with empty
clusters repaired by stealing the point farthest from its centroid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import KTooLarge

MAX_ITERATIONS = 100

DEFAULT_SEED = 42


@dataclass(frozen=True)
class ClusterPlan:
    n_docs: int
    k: Optional[int]


def plan_clusters(n_docs: int) -> ClusterPlan:
    """Cluster-count rule: >50 docs use 10, 5..50 use 5, fewer are skipped."""
    if n_docs > 50:
        return ClusterPlan(n_docs=n_docs, k=10)
    if n_docs >= 5:
        return ClusterPlan(n_docs=n_docs, k=5)
    return ClusterPlan(n_docs=n_docs, k=None)


@dataclass
class KmeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int
    inertia_history: list[float]


def _squared_distances(vectors: np.ndarray, center: np.ndarray) -> np.ndarray:
    diff = vectors - center[None, :]
    return np.einsum("ij,ij->i", diff, diff)


def _plusplus_init(vectors: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = vectors.shape[0]
    first = int(rng.integers(n))
    centers = [vectors[first].copy()]
    best = _squared_distances(vectors, centers[0])
    for _ in range(1, k):
        total = float(best.sum())
        if total > 0:
            probs = best / total
        else:
            # all remaining mass on already-chosen points; fall back to uniform
            probs = np.full(n, 1.0 / n)
        idx = int(rng.choice(n, p=probs))
        centers.append(vectors[idx].copy())
        best = np.minimum(best, _squared_distances(vectors, centers[-1]))
    return np.stack(centers)


def _assign(vectors: np.ndarray, centers: np.ndarray) -> np.ndarray:
    # squared Euclidean to every center; argmin breaks ties toward the lower index
    distances = np.stack([_squared_distances(vectors, c) for c in centers], axis=1)
    return np.argmin(distances, axis=1)


def _inertia(vectors: np.ndarray, centers: np.ndarray, labels: np.ndarray) -> float:
    diff = vectors - centers[labels]
    return float(np.einsum("ij,ij->", diff, diff))


def _repair_empty(vectors: np.ndarray, centers: np.ndarray, labels: np.ndarray, k: int):
    """Give each empty cluster the point currently farthest from its centroid."""
    taken: set[int] = set()
    for cluster_id in range(k):
        if np.any(labels == cluster_id):
            continue
        diff = vectors - centers[labels]
        distances = np.einsum("ij,ij->i", diff, diff)
        for idx in taken:
            distances[idx] = -1.0
        farthest = int(np.argmax(distances))
        labels[farthest] = cluster_id
        taken.add(farthest)


def _recompute(vectors: np.ndarray, labels: np.ndarray, k: int,
               previous: np.ndarray) -> np.ndarray:
    centers = previous.copy()
    for cluster_id in range(k):
        mask = labels == cluster_id
        if np.any(mask):
            centers[cluster_id] = vectors[mask].mean(axis=0)
    return centers


def kmeans(vectors: np.ndarray, k: int, seed: int = DEFAULT_SEED) -> KmeansResult:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValueError(f"vectors must be 2-dimensional, got shape {vectors.shape}")
    n = vectors.shape[0]
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if k > n:
        raise KTooLarge(f"k={k} exceeds {n} points")

    rng = np.random.default_rng(seed)
    centers = _plusplus_init(vectors, k, rng)
    labels = None
    history: list[float] = []
    n_iter = 0
    for n_iter in range(1, MAX_ITERATIONS + 1):
        new_labels = _assign(vectors, centers)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        _repair_empty(vectors, centers, labels, k)
        centers = _recompute(vectors, labels, k, centers)
        history.append(_inertia(vectors, centers, labels))
    else:
        # iteration cap: one last assignment so every point maps to its
        # nearest centroid even without a fixpoint
        labels = _assign(vectors, centers)
        history.append(_inertia(vectors, centers, labels))

    return KmeansResult(labels=labels, centers=centers,
                        inertia=_inertia(vectors, centers, labels),
                        n_iter=n_iter, inertia_history=history)
