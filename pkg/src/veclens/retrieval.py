"""Distance metrics, nearest-neighbor retrieval, analogies, distance matrices.

Retrieval is a brute-force linear scan: stores here are desk-scale, and an
exact stable ranking is worth more than an approximate index.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, OOVError, ZeroNormError
from .store import Embedding, EmbeddingSet, VectorStore

__all__ = [
    "ScoredNeighbor",
    "DistanceMatrix",
    "cosine_distance",
    "euclidean_distance",
    "score_similar",
    "analogy",
    "distance_matrix",
]

METRICS = ("cosine", "euclidean")


@dataclass(frozen=True)
class ScoredNeighbor:
    embedding: Embedding
    distance: float

    @property
    def name(self):
        return self.embedding.name


@dataclass(frozen=True)
class DistanceMatrix:
    labels: tuple
    values: np.ndarray
    metric: str

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        vals = np.asarray(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _check_dims(a, b):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dim {a.shape[0]} vs {b.shape[0]}")


def cosine_distance(a, b) -> float:
    """1 - cos(a, b); range [0, 2].  Zero-norm inputs are an error."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dims(a, b)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine distance undefined for zero-norm vector")
    cos = float(a @ b) / (na * nb)
    return 1.0 - max(-1.0, min(1.0, cos))


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    _check_dims(a, b)
    return float(np.linalg.norm(a - b))


def _entries(source):
    """Uniform (name, vector) view over a store or a set, in insertion order."""
    if isinstance(source, VectorStore):
        return source.tokens, source.matrix
    if isinstance(source, EmbeddingSet):
        return source.names, source.matrix()
    raise TypeError(f"unsupported source: {type(source).__name__}")


def score_similar(source, query: Embedding, n: int, metric: str = "cosine"):
    """Rank everything in `source` by distance to `query`, ascending.

    Ties keep insertion order.  The query itself is not excluded.  Under
    cosine, zero-norm entries are skipped with a warning.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if metric not in METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    names, matrix = _entries(source)
    if len(names) == 0:
        raise ValueError("source is empty")
    if matrix.shape[1] != query.dim:
        raise DimensionMismatchError(f"dim {matrix.shape[1]} vs {query.dim}")

    if metric == "cosine":
        norms = np.linalg.norm(matrix, axis=1)
        keep = norms > 0.0
        skipped = int((~keep).sum())
        if skipped:
            warnings.warn(f"skipped {skipped} zero-norm entr(y/ies) under cosine")
        qnorm = np.linalg.norm(query.vector)
        if qnorm == 0.0:
            raise ZeroNormError("cosine distance undefined for zero-norm query")
        cos = (matrix[keep] @ query.vector) / (norms[keep] * qnorm)
        dists = 1.0 - np.clip(cos, -1.0, 1.0)
        kept_idx = np.nonzero(keep)[0]
    else:
        diffs = matrix - query.vector
        dists = np.linalg.norm(diffs, axis=1)
        kept_idx = np.arange(len(names))

    order = np.argsort(dists, kind="stable")[:n]
    return [
        ScoredNeighbor(Embedding(names[kept_idx[i]], matrix[kept_idx[i]]), float(dists[i]))
        for i in order
    ]


def analogy(
    store: VectorStore,
    positive,
    negative=(),
    n: int = 5,
    metric: str = "cosine",
    exclude_inputs: bool = True,
):
    """Rank neighbors of (sum of positive) - (sum of negative).

    With `exclude_inputs` (the default, standard analogy-evaluation practice)
    every input token is dropped from the candidate pool before ranking.
    """
    positive = list(positive)
    negative = list(negative)
    if not positive:
        raise ValueError("positive tokens must be non-empty")
    missing = [t for t in positive + negative if t not in store]
    if missing:
        raise OOVError(missing)
    query = np.zeros(store.dim)
    for t in positive:
        query = query + store.vector(t)
    for t in negative:
        query = query - store.vector(t)

    if exclude_inputs:
        banned = set(positive) | set(negative)
        names = [t for t in store.tokens if t not in banned]
        if not names:
            raise ValueError("no candidates remain after excluding inputs")
        matrix = np.stack([store.vector(t) for t in names])
        source = EmbeddingSet(Embedding(t, v) for t, v in zip(names, matrix))
    else:
        source = store
    return score_similar(source, Embedding("query", query), n, metric)


def distance_matrix(emb_set: EmbeddingSet, metric: str = "cosine") -> DistanceMatrix:
    """Symmetric pairwise distance matrix over a set, labels in set order."""
    if metric not in METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    if len(emb_set) == 0:
        raise ValueError("set is empty")
    names = emb_set.names
    matrix = emb_set.matrix()
    if metric == "cosine":
        norms = np.linalg.norm(matrix, axis=1)
        zero = [names[i] for i in np.nonzero(norms == 0.0)[0]]
        if zero:
            raise ZeroNormError(
                "zero-norm member(s) under cosine: " + ", ".join(zero)
            )
        unit = matrix / norms[:, None]
        vals = 1.0 - np.clip(unit @ unit.T, -1.0, 1.0)
    else:
        diff = matrix[:, None, :] - matrix[None, :, :]
        vals = np.linalg.norm(diff, axis=2)
    np.fill_diagonal(vals, 0.0)
    vals = (vals + vals.T) / 2.0  # enforce exact symmetry against fp drift
    return DistanceMatrix(tuple(names), vals, metric)
