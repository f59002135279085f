"""Exact-scan vector store with JSONL persistence."""

from __future__ import annotations

import json
import threading
from pathlib import Path

import numpy as np

from .chunking import Chunk
from .embedding import validate_vector
from .errors import DimensionMismatchError, EmptyIndexError, StoreError


class VectorStore:
    """In-memory store of (chunk, vector) pairs with cosine search.

    All vectors share one dimension, fixed by the first insert. Search
    is an exact scan; score ties break on chunk_id ascending. A single
    lock serializes mutation, so readers and writers from different
    threads are safe.
    """

    def __init__(self, dim: int | None = None):
        if dim is not None and dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self._entries: dict[str, tuple[Chunk, np.ndarray, float]] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, chunk_id: str) -> bool:
        return chunk_id in self._entries

    def add(self, chunk: Chunk, vector: np.ndarray) -> None:
        vec = validate_vector(vector, dim=self.dim)
        with self._lock:
            if self.dim is None:
                self.dim = int(vec.shape[0])
            if chunk.chunk_id in self._entries:
                raise StoreError(f"duplicate chunk_id: {chunk.chunk_id}")
            norm = float(np.linalg.norm(vec))
            self._entries[chunk.chunk_id] = (chunk, vec, norm)

    def get(self, chunk_id: str) -> Chunk:
        try:
            return self._entries[chunk_id][0]
        except KeyError:
            raise StoreError(f"unknown chunk_id: {chunk_id}") from None

    def chunks(self) -> list[Chunk]:
        return [entry[0] for entry in self._entries.values()]

    def doc_ids(self) -> set[str]:
        return {entry[0].doc_id for entry in self._entries.values()}

    def delete_doc(self, doc_id: str) -> int:
        """Remove every entry of one document; returns the count removed."""
        with self._lock:
            victims = [cid for cid, (c, _, _) in self._entries.items() if c.doc_id == doc_id]
            for cid in victims:
                del self._entries[cid]
            return len(victims)

    def search(self, query_vec: np.ndarray, k: int) -> list[tuple[Chunk, float]]:
        """Top-k entries by cosine similarity to the query vector."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if not self._entries:
            raise EmptyIndexError("index empty")
        q = validate_vector(query_vec, dim=self.dim)
        qnorm = float(np.linalg.norm(q))

        entries = list(self._entries.values())
        matrix = np.stack([vec for _, vec, _ in entries])
        norms = np.array([norm for _, _, norm in entries])
        scores = (matrix @ q) / (norms * qnorm)
        order = sorted(
            range(len(entries)), key=lambda i: (-scores[i], entries[i][0].chunk_id)
        )
        return [(entries[i][0], float(scores[i])) for i in order[:k]]

    def save(self, path: str | Path) -> None:
        """Write the canonical JSONL export: one entry per line, id-sorted."""
        path = Path(path)
        lines = []
        for cid in sorted(self._entries):
            chunk, vec, _ = self._entries[cid]
            lines.append(
                json.dumps(
                    {
                        "chunk_id": chunk.chunk_id,
                        "doc_id": chunk.doc_id,
                        "level": chunk.level,
                        "char_span": list(chunk.char_span) if chunk.char_span else None,
                        "text": chunk.text,
                        "vector": [float(x) for x in vec],
                    },
                    ensure_ascii=False,
                )
            )
        path.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "VectorStore":
        path = Path(path)
        if not path.is_file():
            raise StoreError(f"no index at {path}")
        store = cls()
        for n, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                chunk = Chunk(
                    chunk_id=row["chunk_id"],
                    doc_id=row["doc_id"],
                    text=row["text"],
                    char_span=tuple(row["char_span"]) if row["char_span"] else None,
                    level=row["level"],
                )
                vector = np.asarray(row["vector"], dtype=float)
            except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
                raise StoreError(f"corrupt index line {n} in {path}: {exc}") from exc
            try:
                store.add(chunk, vector)
            except DimensionMismatchError as exc:
                raise StoreError(f"corrupt index line {n} in {path}: {exc}") from exc
        return store
