"""Immutable vector stores loaded from word2vec/GloVe text files.

A store is a token -> vector table of uniform dimension.  Lookups hand out
:class:`Embedding` objects; phrases embed as the sum of their token vectors.
"""

from __future__ import annotations

import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateNameError,
    DimensionMismatchError,
    OOVError,
    StoreLoadError,
)

__all__ = [
    "Embedding",
    "VectorStore",
    "EmbeddingSet",
    "load_store",
    "save_store",
    "embed_phrase",
    "get_set",
    "featurize",
]


@dataclass(frozen=True)
class Embedding:
    """A named vector, optionally remembering the expression that produced it."""

    name: str
    vector: np.ndarray
    derivation: str | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("embedding name must be non-empty")
        vec = np.asarray(self.vector, dtype=np.float64)
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def __repr__(self):
        return f"Emb[{self.name}]"


class VectorStore:
    """Read-only token -> vector table; file order is preserved.

    `duplicate_warnings` counts duplicate tokens dropped at load time
    (first occurrence wins).
    """

    def __init__(self, label, tokens, matrix, duplicate_warnings=0):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != len(tokens):
            raise ValueError("matrix shape does not match token count")
        matrix.setflags(write=False)
        self.label = label
        self._tokens = list(tokens)
        self._matrix = matrix
        self._index = {t: i for i, t in enumerate(self._tokens)}
        if len(self._index) != len(self._tokens):
            raise ValueError("tokens must be unique")
        self.duplicate_warnings = duplicate_warnings

    @property
    def dim(self) -> int:
        return self._matrix.shape[1]

    @property
    def tokens(self) -> list[str]:
        return list(self._tokens)

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    def __len__(self):
        return len(self._tokens)

    def __contains__(self, token):
        return token in self._index

    def vector(self, token: str) -> np.ndarray:
        try:
            return self._matrix[self._index[token]]
        except KeyError:
            raise OOVError([token]) from None

    def lookup(self, token: str) -> Embedding:
        return Embedding(token, self.vector(token))

    def __getitem__(self, token):
        return self.lookup(token)


class EmbeddingSet:
    """Ordered, uniquely named collection of same-dimension embeddings."""

    def __init__(self, embeddings):
        items: dict[str, Embedding] = {}
        dim = None
        for emb in embeddings:
            if emb.name in items:
                raise DuplicateNameError(f"duplicate embedding name: {emb.name!r}")
            if dim is None:
                dim = emb.dim
            elif emb.dim != dim:
                raise DimensionMismatchError(
                    f"embedding {emb.name!r} has dim {emb.dim}, expected {dim}"
                )
            items[emb.name] = emb
        self._items = items
        self._dim = dim

    @property
    def dim(self):
        if self._dim is None:
            raise ValueError("empty set has no dimension")
        return self._dim

    @property
    def names(self) -> list[str]:
        return list(self._items)

    def __len__(self):
        return len(self._items)

    def __iter__(self):
        return iter(self._items.values())

    def __contains__(self, name):
        return name in self._items

    def __getitem__(self, name) -> Embedding:
        try:
            return self._items[name]
        except KeyError:
            raise OOVError([name]) from None

    def matrix(self) -> np.ndarray:
        if not self._items:
            return np.zeros((0, 0))
        return np.stack([e.vector for e in self._items.values()])


def _parse_rows(lines, start_lineno, path):
    tokens: list[str] = []
    rows: list[np.ndarray] = []
    seen: set[str] = set()
    duplicates = 0
    dim = None
    for offset, line in enumerate(lines):
        lineno = start_lineno + offset
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split(" ")
        token, values = parts[0], parts[1:]
        try:
            vec = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise StoreLoadError(f"{path}:{lineno}: bad float value ({exc})") from None
        if dim is None:
            if vec.size == 0:
                raise StoreLoadError(f"{path}:{lineno}: row has no vector values")
            dim = vec.size
        elif vec.size != dim:
            raise StoreLoadError(
                f"{path}:{lineno}: row has {vec.size} values, expected {dim}"
            )
        if not np.all(np.isfinite(vec)):
            raise StoreLoadError(f"{path}:{lineno}: non-finite value in row {token!r}")
        if token in seen:
            duplicates += 1
            continue
        seen.add(token)
        tokens.append(token)
        rows.append(vec)
    if not tokens:
        raise StoreLoadError(f"{path}: no vector rows found")
    return tokens, np.stack(rows), duplicates


def _looks_like_header(line: str) -> bool:
    parts = line.strip().split()
    return len(parts) == 2 and all(p.isdigit() for p in parts)


def load_store(path, format: str = "auto") -> VectorStore:
    """Load a word2vec-text or GloVe-text vector file.

    `auto` treats the file as word2vec_text iff the first line is exactly two
    base-10 integers.  Duplicate tokens keep their first occurrence and bump
    the store's `duplicate_warnings` counter.
    """
    if format not in ("auto", "word2vec_text", "glove_text"):
        raise ValueError(f"unknown format: {format!r}")
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise StoreLoadError(f"cannot read {path}: {exc}") from None
    except UnicodeDecodeError as exc:
        raise StoreLoadError(f"{path} is not valid UTF-8: {exc}") from None
    if not lines:
        raise StoreLoadError(f"{path}: file is empty")

    has_header = False
    if format == "word2vec_text":
        if not _looks_like_header(lines[0]):
            raise StoreLoadError(f"{path}:1: expected '<vocab_size> <dim>' header")
        has_header = True
    elif format == "auto":
        has_header = _looks_like_header(lines[0])

    body = lines[1:] if has_header else lines
    tokens, matrix, duplicates = _parse_rows(body, 2 if has_header else 1, path)
    if duplicates:
        warnings.warn(
            f"{path}: dropped {duplicates} duplicate token(s), first occurrence kept"
        )
    label = os.path.basename(str(path))
    return VectorStore(label, tokens, matrix, duplicate_warnings=duplicates)


def save_store(store: VectorStore, path, format: str = "word2vec_text") -> None:
    """Write a store back to disk; round-trips within 1e-6 per component."""
    if format not in ("word2vec_text", "glove_text"):
        raise ValueError(f"unknown format: {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        if format == "word2vec_text":
            fh.write(f"{len(store)} {store.dim}\n")
        for token in store.tokens:
            values = " ".join(f"{v:.17g}" for v in store.vector(token))
            fh.write(f"{token} {values}\n")


def embed_phrase(store: VectorStore, phrase: str) -> Embedding:
    """Sum the vectors of the whitespace-separated tokens in `phrase`."""
    words = phrase.split()
    if not words:
        raise ValueError("phrase is empty")
    missing = [w for w in words if w not in store]
    if missing:
        raise OOVError(missing)
    total = np.zeros(store.dim)
    for w in words:
        total = total + store.vector(w)
    return Embedding(phrase, total)


def get_set(store: VectorStore, specs) -> EmbeddingSet:
    """Evaluate each expression string and collect the results, order preserved."""
    from . import algebra

    specs = list(specs)
    if not specs:
        raise ValueError("specs must be non-empty")
    return EmbeddingSet(algebra.evaluate(algebra.parse(s), store) for s in specs)


def featurize(store: VectorStore, texts) -> np.ndarray:
    """Phrase-embed each text into one row of a (len(texts), dim) matrix."""
    texts = list(texts)
    out = np.zeros((len(texts), store.dim))
    for i, text in enumerate(texts):
        try:
            out[i] = embed_phrase(store, text).vector
        except OOVError as exc:
            exc.args = (f"row {i}: {exc.args[0]}",)
            raise
    return out
