"""Dimensionality reduction over embedding sets: PCA and classical MDS.

Both transforms return the members re-expressed in component coordinates plus
one pseudo-embedding per component axis ("pca_0", "mds_1", ...), so reduced
axes can be used directly as plot axes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankError
from .retrieval import METRICS, distance_matrix
from .store import Embedding, EmbeddingSet

__all__ = ["TransformResult", "pca_transform", "mds_transform"]

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class TransformResult:
    reduced: EmbeddingSet
    explained_variance: tuple | None = None


def _fix_signs(directions: np.ndarray, coords: np.ndarray):
    """Flip each direction so its largest-magnitude entry is positive.

    Eigenvectors are sign-ambiguous; pinning the sign makes outputs
    reproducible.  Ties resolve to the lowest index (np.argmax behavior).
    """
    for j in range(directions.shape[0]):
        lead = np.argmax(np.abs(directions[j]))
        if directions[j, lead] < 0:
            directions[j] = -directions[j]
            coords[:, j] = -coords[:, j]
    return directions, coords


def _axis_embeddings(prefix: str, k: int) -> list[Embedding]:
    return [Embedding(f"{prefix}_{i}", np.eye(k)[i]) for i in range(k)]


def _build_result(emb_set, coords, prefix, k, explained=None):
    members = [
        Embedding(name, coords[i]) for i, name in enumerate(emb_set.names)
    ]
    reduced = EmbeddingSet(members + _axis_embeddings(prefix, k))
    return TransformResult(reduced, explained)


def pca_transform(emb_set: EmbeddingSet, k: int) -> TransformResult:
    """Project a set onto its top-k principal directions.

    Data is centered (never whitened); directions come from the SVD of the
    centered matrix.  Explained variances use the n-1 divisor and come out
    descending.
    """
    n = len(emb_set)
    if n < 2:
        raise ValueError("PCA needs at least 2 members")
    dim = emb_set.dim
    if not (1 <= k <= min(n, dim)):
        raise ValueError(f"k={k} out of range for {n} members of dim {dim}")
    data = emb_set.matrix()
    centered = data - data.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > max(s[0], 1.0) * _RANK_RTOL)) if s.size else 0
    if k > rank:
        raise RankError(f"data rank is {rank}, cannot extract {k} components")
    directions = vt[:k].copy()
    coords = centered @ directions.T
    directions, coords = _fix_signs(directions, coords)
    explained = tuple((s[:k] ** 2) / (n - 1))
    return _build_result(emb_set, coords, "pca", k, explained)


def mds_transform(emb_set: EmbeddingSet, k: int, metric: str = "euclidean") -> TransformResult:
    """Classical MDS on the pairwise distance matrix of a set.

    Squared distances are double-centered; coordinates are the top-k
    eigenvectors scaled by sqrt(eigenvalue).  Exact for euclidean-embeddable
    data.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric: {metric!r}")
    n = len(emb_set)
    if n < k + 1:
        raise ValueError(f"MDS with k={k} needs at least {k + 1} members, got {n}")
    dmat = distance_matrix(emb_set, metric).values
    sq = dmat**2
    centering = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * centering @ sq @ centering
    eigvals, eigvecs = np.linalg.eigh(gram)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    scale = max(abs(eigvals[0]), 1.0)
    if np.any(eigvals[:k] <= scale * _RANK_RTOL):
        rank = int(np.sum(eigvals > scale * _RANK_RTOL))
        raise RankError(f"distance data rank is {rank}, cannot extract {k} components")
    coords = eigvecs[:, :k] * np.sqrt(eigvals[:k])
    directions = coords.T.copy()
    _, coords = _fix_signs(directions, coords)
    return _build_result(emb_set, coords, "mds", k)
