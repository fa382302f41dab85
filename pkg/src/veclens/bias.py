"""Bias axes from word pairs, projection-removal debiasing, overlap reports.

Implements the projection-removal step of Bolukbasi-style debiasing: build a
direction as the mean of pair differences, then reject every member on it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .errors import OOVError, ZeroAxisError
from .retrieval import score_similar
from .store import Embedding, EmbeddingSet, VectorStore

__all__ = [
    "BiasAxis",
    "OverlapReport",
    "build_bias_axis",
    "debias_set",
    "pair_difference_set",
    "neighborhood_overlap",
]


@dataclass(frozen=True)
class BiasAxis:
    axis: Embedding
    source_pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "source_pairs", tuple(map(tuple, self.source_pairs)))


def _check_vocab(store, tokens):
    missing = [t for t in tokens if t not in store]
    if missing:
        raise OOVError(sorted(set(missing), key=missing.index))


def build_bias_axis(store: VectorStore, pairs) -> BiasAxis:
    """Mean of the (first - second) difference vectors over word pairs."""
    pairs = [tuple(p) for p in pairs]
    if not pairs:
        raise ValueError("pairs must be non-empty")
    _check_vocab(store, [t for pair in pairs for t in pair])
    diffs = np.stack([store.vector(a) - store.vector(b) for a, b in pairs])
    mean = diffs.mean(axis=0)
    if float(mean @ mean) == 0.0:
        raise ZeroAxisError("pair differences cancel to a zero axis")
    return BiasAxis(Embedding(f"bias_axis({len(pairs)} pairs)", mean), pairs)


def debias_set(emb_set: EmbeddingSet, axis: BiasAxis, keep_names: bool = False) -> EmbeddingSet:
    """Reject every member on the bias axis.

    With `keep_names`, members keep their original names so the debiased
    space can still be addressed by token (used for overlap reports);
    otherwise names follow the rejection naming rule.
    """
    rejected = algebra.set_apply(emb_set, "reject", axis.axis)
    if not keep_names:
        return rejected
    return EmbeddingSet(
        Embedding(old, emb.vector)
        for old, emb in zip(emb_set.names, rejected)
    )


def pair_difference_set(store: VectorStore, pairs) -> EmbeddingSet:
    """Difference embeddings '(<a> - <b>)' per pair, ready for a distance map."""
    pairs = [tuple(p) for p in pairs]
    _check_vocab(store, [t for pair in pairs for t in pair])
    return EmbeddingSet(
        Embedding(f"({a} - {b})", store.vector(a) - store.vector(b))
        for a, b in pairs
    )


@dataclass(frozen=True)
class OverlapReport:
    jaccard: float
    before_tokens: tuple
    after_tokens: tuple


def _top_tokens(space, token, n, metric):
    if isinstance(space, VectorStore):
        query = space.lookup(token)
    else:
        query = space[token]
    return tuple(sn.name for sn in score_similar(space, query, n, metric))


def neighborhood_overlap(before, after, token: str, n: int, metric: str = "cosine") -> OverlapReport:
    """Jaccard overlap of the token's top-n neighborhoods in two spaces.

    The query token itself is part of each neighborhood, matching printed
    similarity listings that start with the query at distance 0.
    """
    if token not in before:
        raise OOVError([token])
    if token not in after:
        raise OOVError([token])
    before_tokens = _top_tokens(before, token, n, metric)
    after_tokens = _top_tokens(after, token, n, metric)
    inter = set(before_tokens) & set(after_tokens)
    union = set(before_tokens) | set(after_tokens)
    return OverlapReport(len(inter) / len(union), before_tokens, after_tokens)
