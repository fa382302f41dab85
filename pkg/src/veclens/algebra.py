"""Expression language over embeddings: +, -, and | (orthogonal rejection).

Grammar (lowest precedence first)::

    expr := sum ('|' sum)*          left-assoc
    sum  := atom (('+'|'-') atom)*  left-assoc
    atom := WORD | '"' PHRASE '"' | '(' expr ')'

WORD is a maximal run of non-whitespace characters excluding ``()+-|"``.
Quoted phrases embed as the sum of their tokens.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ParseError, ZeroAxisError
from .store import Embedding, EmbeddingSet, VectorStore, embed_phrase

__all__ = [
    "Word",
    "Phrase",
    "Add",
    "Sub",
    "Reject",
    "parse",
    "render",
    "evaluate",
    "reject",
    "projection_coefficient",
    "set_apply",
    "average",
]


@dataclass(frozen=True)
class Word:
    token: str


@dataclass(frozen=True)
class Phrase:
    text: str


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Reject:
    left: object
    right: object


_RESERVED = set('()+-|"')


def _tokenize(text):
    """Yield (kind, value, offset) triples; kind is 'word', 'phrase' or a symbol."""
    out = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "()+-|":
            out.append((ch, ch, i))
            i += 1
            continue
        if ch == '"':
            end = text.find('"', i + 1)
            if end < 0:
                raise ParseError("unterminated quoted phrase", i)
            phrase = text[i + 1 : end]
            if not phrase.strip():
                raise ParseError("empty quoted phrase", i)
            out.append(("phrase", phrase, i))
            i = end + 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in _RESERVED:
            j += 1
        out.append(("word", text[i:j], i))
        i = j
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def _peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _offset(self):
        tok = self._peek()
        return tok[2] if tok else len(self.text)

    def expr(self):
        node = self.sum()
        while (tok := self._peek()) and tok[0] == "|":
            self.pos += 1
            node = Reject(node, self.sum())
        return node

    def sum(self):
        node = self.atom()
        while (tok := self._peek()) and tok[0] in "+-":
            self.pos += 1
            rhs = self.atom()
            node = Add(node, rhs) if tok[0] == "+" else Sub(node, rhs)
        return node

    def atom(self):
        tok = self._peek()
        if tok is None:
            raise ParseError("expected a word, phrase or '('", self._offset())
        kind, value, offset = tok
        if kind == "word":
            self.pos += 1
            return Word(value)
        if kind == "phrase":
            self.pos += 1
            return Phrase(value)
        if kind == "(":
            self.pos += 1
            node = self.expr()
            closing = self._peek()
            if closing is None or closing[0] != ")":
                raise ParseError("unbalanced parentheses", self._offset())
            self.pos += 1
            return node
        raise ParseError(f"unexpected {value!r}", offset)


def parse(text: str):
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    parser = _Parser(text)
    node = parser.expr()
    if (tok := parser._peek()) is not None:
        raise ParseError(f"unexpected {tok[1]!r}", tok[2])
    return node


def render(ast) -> str:
    """Canonical infix form: every binary node fully parenthesized."""
    if isinstance(ast, Word):
        return ast.token
    if isinstance(ast, Phrase):
        return f'"{ast.text}"'
    op = {Add: "+", Sub: "-", Reject: "|"}[type(ast)]
    return f"({render(ast.left)} {op} {render(ast.right)})"


def _reject_vec(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    bb = float(b @ b)
    if bb == 0.0:
        raise ZeroAxisError("rejection axis has zero norm")
    return a - (float(a @ b) / bb) * b


def evaluate(ast, store: VectorStore) -> Embedding:
    """Evaluate an AST against a store; derived results carry their rendering."""
    vec = _eval_vec(ast, store)
    name = render(ast)
    if isinstance(ast, (Word, Phrase)):
        if isinstance(ast, Phrase):
            return Embedding(ast.text, vec)
        return Embedding(name, vec)
    return Embedding(name, vec, derivation=name)


def _eval_vec(ast, store) -> np.ndarray:
    if isinstance(ast, Word):
        return store.vector(ast.token)
    if isinstance(ast, Phrase):
        return embed_phrase(store, ast.text).vector
    left = _eval_vec(ast.left, store)
    right = _eval_vec(ast.right, store)
    if isinstance(ast, Add):
        return left + right
    if isinstance(ast, Sub):
        return left - right
    return _reject_vec(left, right)


def _check_dims(a: Embedding, b: Embedding):
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} vs {b.dim}")


def reject(a: Embedding, b: Embedding) -> Embedding:
    """a minus its component parallel to b ("projected away from" b)."""
    _check_dims(a, b)
    name = f"({a.name} | {b.name})"
    # derivation left unset: operand names need not be grammar-valid expressions
    return Embedding(name, _reject_vec(a.vector, b.vector))


def projection_coefficient(a: Embedding, axis: Embedding) -> float:
    """Coordinate of a along axis: (a . axis) / (axis . axis)."""
    _check_dims(a, axis)
    denom = float(axis.vector @ axis.vector)
    if denom == 0.0:
        raise ZeroAxisError("projection axis has zero norm")
    return float(a.vector @ axis.vector) / denom


_SET_OPS = {
    "add": ("+", lambda a, b: a + b),
    "sub": ("-", lambda a, b: a - b),
    "reject": ("|", _reject_vec),
}


def set_apply(emb_set: EmbeddingSet, op: str, rhs: Embedding) -> EmbeddingSet:
    """Apply a binary op member-wise; names become '(<member> <op> <rhs>)'."""
    if op not in _SET_OPS:
        raise ValueError(f"unknown op: {op!r}")
    if len(emb_set) and emb_set.dim != rhs.dim:
        raise DimensionMismatchError(f"dim {emb_set.dim} vs {rhs.dim}")
    symbol, fn = _SET_OPS[op]
    if op == "reject" and float(rhs.vector @ rhs.vector) == 0.0:
        raise ZeroAxisError("rejection axis has zero norm")
    members = []
    for emb in emb_set:
        name = f"({emb.name} {symbol} {rhs.name})"
        members.append(Embedding(name, fn(emb.vector, rhs.vector), derivation=None))
    return EmbeddingSet(members)


def average(emb_set: EmbeddingSet) -> Embedding:
    """Componentwise mean of all members, named 'average(<k>)'."""
    if len(emb_set) == 0:
        raise ValueError("cannot average an empty set")
    mean = emb_set.matrix().mean(axis=0)
    return Embedding(f"average({len(emb_set)})", mean)
