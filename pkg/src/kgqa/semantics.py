"""Word-embedding store, phrase vectors, predicate similarity and predicate
polarity.

Predicate similarity is cosine similarity clamped to [0, 1] so it slots
directly into the bounded decision features.  Phrases compose by averaging
their in-vocabulary token vectors; when neither phrase has a vector the
fallback is exact string match — similarity is never fabricated for unknown
words.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

from .canonical import canonical_id
from .errors import EmbeddingFormatError

DEFAULT_NEGATION_LEXICON = frozenset({
    "not", "no", "never", "cannot", "without", "n't",
    "incompatible", "unsupported",
})


@dataclass
class EmbeddingStore:
    dimension: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def __contains__(self, token: str) -> bool:
        return token.lower() in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, token: str) -> np.ndarray | None:
        return self.vectors.get(token.lower())


def load_embeddings(source) -> EmbeddingStore:
    """Read a plain-text vector file: ``token c1 .. cd`` per line, with an
    optional ``count dim`` header.  Duplicate tokens keep their first vector."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, "r", encoding="utf-8") as fh:
            return _read_vectors(fh)
    return _read_vectors(source)


def _read_vectors(lines) -> EmbeddingStore:
    dimension = None
    vectors: dict[str, np.ndarray] = {}
    for line_no, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        if line_no == 1 and len(parts) == 2:
            try:
                int(parts[0]), int(parts[1])
            except ValueError:
                pass
            else:
                dimension = int(parts[1])
                continue
        token, values = parts[0].lower(), parts[1:]
        try:
            vec = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise EmbeddingFormatError(line_no, f"non-numeric component: {exc}") from exc
        if not np.all(np.isfinite(vec)):
            raise EmbeddingFormatError(line_no, "non-finite vector component")
        if dimension is None:
            if vec.size == 0:
                raise EmbeddingFormatError(line_no, "vector has no components")
            dimension = vec.size
        if vec.size != dimension:
            raise EmbeddingFormatError(
                line_no,
                f"expected {dimension} components, got {vec.size}")
        vectors.setdefault(token, vec)
    if dimension is None:
        raise EmbeddingFormatError(0, "empty embedding stream")
    return EmbeddingStore(dimension, vectors)


def _phrase_tokens(phrase: str) -> list[str]:
    return [t for t in phrase.replace("_", " ").lower().split() if t]


def phrase_vector(store: EmbeddingStore, phrase: str) -> np.ndarray | None:
    """Mean of the in-vocabulary token vectors; None when every token is
    out of vocabulary."""
    hits = [store.vectors[t] for t in _phrase_tokens(phrase) if t in store.vectors]
    if not hits:
        return None
    return np.mean(hits, axis=0)


def predicate_similarity(store: EmbeddingStore | None, p1: str, p2: str) -> float:
    """Clamped cosine similarity of two predicate phrases in [0, 1].

    String-identical phrases score 1.0 outright; when either phrase has no
    usable vector the score is 1.0 for equal canonical forms, else 0.0.
    """
    c1, c2 = canonical_id(p1), canonical_id(p2)
    if c1 == c2:
        return 1.0
    v1 = phrase_vector(store, p1) if store is not None else None
    v2 = phrase_vector(store, p2) if store is not None else None
    if v1 is None or v2 is None:
        return 0.0
    n1, n2 = float(np.linalg.norm(v1)), float(np.linalg.norm(v2))
    if n1 == 0.0 or n2 == 0.0:
        return 0.0
    cos = float(np.dot(v1, v2) / (n1 * n2))
    if math.isnan(cos):
        return 0.0
    return min(1.0, max(0.0, cos))


def is_negative_predicate(phrase: str,
                          lexicon=DEFAULT_NEGATION_LEXICON) -> bool:
    """True when any token of the predicate is in the negation lexicon."""
    return any(t in lexicon for t in _phrase_tokens(phrase))
