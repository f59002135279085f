"""Text embedding: the offline hashing embedder and vector math."""

from __future__ import annotations

import hashlib
import math
from typing import Protocol, Sequence

import numpy as np

from .errors import DimensionMismatchError, EmbeddingError


class Embedder(Protocol):
    """Anything that maps text to fixed-dimension vectors."""

    dim: int

    def embed(self, text: str) -> np.ndarray: ...

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]: ...


class MockEmbedder:
    """Deterministic hashing embedder, used when no service is configured.

    Each character trigram is hashed (keyed by the seed) to a component
    index and a sign; the accumulated vector is L2-normalized. Texts
    sharing many trigrams land close together, disjoint texts stay
    near-orthogonal, and identical texts map to identical vectors.
    """

    def __init__(self, dim: int = 128, seed: int = 0):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self.dim = dim
        self.seed = seed
        self._slots: dict[str, tuple[int, float]] = {}

    def _slot(self, gram: str) -> tuple[int, float]:
        cached = self._slots.get(gram)
        if cached is None:
            h = hashlib.blake2b(f"{self.seed}|{gram}".encode(), digest_size=8).digest()
            cached = (
                int.from_bytes(h[:4], "big") % self.dim,
                1.0 if h[4] & 1 else -1.0,
            )
            self._slots[gram] = cached
        return cached

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise EmbeddingError("cannot embed empty text")
        vec = np.zeros(self.dim)
        if len(text) < 3:
            grams = [text]
        else:
            grams = [text[i : i + 3] for i in range(len(text) - 2)]
        for gram in grams:
            idx, sign = self._slot(gram)
            vec[idx] += sign
        if not vec.any():  # exact sign cancellation; keep the norm positive
            vec[self._slot(text)[0]] = 1.0
        return vec / np.linalg.norm(vec)

    def embed_batch(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self.embed(t) for t in texts]


def validate_vector(vec: np.ndarray, dim: int | None = None) -> np.ndarray:
    """Check shape, finiteness, and a positive norm; returns the array."""
    vec = np.asarray(vec, dtype=float)
    if vec.ndim != 1:
        raise EmbeddingError(f"vector must be 1-D, got shape {vec.shape}")
    if dim is not None and vec.shape[0] != dim:
        raise DimensionMismatchError(f"vector has dimension {vec.shape[0]}, expected {dim}")
    if not np.isfinite(vec).all():
        raise EmbeddingError("vector has non-finite components")
    if not float(np.dot(vec, vec)) > 0.0:
        raise EmbeddingError("vector has zero norm")
    return vec


def embed(text: str, embedder: Embedder) -> np.ndarray:
    """Embed one text and validate the result against the embedder contract."""
    if not text:
        raise EmbeddingError("cannot embed empty text")
    return validate_vector(embedder.embed(text), dim=embedder.dim)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine of the angle between two vectors."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"vectors must share one dimension: {u.shape} vs {v.shape}")
    nu = math.sqrt(float(np.dot(u, u)))
    nv = math.sqrt(float(np.dot(v, v)))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    return float(np.dot(u, v)) / (nu * nv)
