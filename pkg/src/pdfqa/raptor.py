"""Hierarchical summary tree over leaf chunks.

Each level clusters the chunks below it with seeded k-means and writes
one summary chunk per cluster. Summaries are indexed alongside the
leaves, so a single flat search covers every level of the tree.
"""

from __future__ import annotations

import logging
import math
import re
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from .chunking import Chunk
from .embedding import Embedder, embed

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RaptorConfig:
    fanout: int = 5
    max_depth: int = 3
    seed: int = 0
    kmeans_iters: int = 50

    def __post_init__(self) -> None:
        if self.fanout < 2:
            raise ValueError("fanout must be >= 2")
        if self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        if self.kmeans_iters < 1:
            raise ValueError("kmeans_iters must be >= 1")


class Summarizer(Protocol):
    """Anything that can fold several chunk texts into one summary."""

    def summarize(self, texts: Sequence[str]) -> str: ...


_SENTENCE_END_RE = re.compile(r"[.!?](?=\s|$)")


def first_sentence(text: str) -> str:
    stripped = text.strip()
    if not stripped:
        return ""
    m = _SENTENCE_END_RE.search(stripped)
    if m:
        return stripped[: m.end()]
    return stripped.splitlines()[0][:200]


class MockSummarizer:
    """Joins each member's first sentence; stands in for an LLM summarizer."""

    max_chars = 1000

    def summarize(self, texts: Sequence[str]) -> str:
        parts = [s for s in (first_sentence(t) for t in texts) if s]
        summary = " ".join(parts)[: self.max_chars]
        return summary if summary else "(empty section)"


def kmeans(vectors: np.ndarray, k: int, seed: int, iters: int = 50) -> np.ndarray:
    """Seeded Lloyd's k-means; returns one cluster label per row.

    Initial centroids are k distinct rows chosen by the seeded RNG. An
    empty cluster is re-seeded at the point currently farthest from its
    own centroid, so every cluster ends non-empty.
    """
    if vectors.ndim != 2:
        raise ValueError("vectors must be a 2-D array")
    n = len(vectors)
    if not (1 <= k <= n):
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centroids = vectors[rng.choice(n, size=k, replace=False)].copy()

    prev: np.ndarray | None = None
    labels = np.zeros(n, dtype=int)
    for _ in range(iters):
        d2 = ((vectors[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        labels = d2.argmin(axis=1)
        assigned_d2 = d2[np.arange(n), labels]
        counts = np.bincount(labels, minlength=k)
        for c in range(k):
            if counts[c] == 0:
                # steal the worst-fitting point, but never the last member
                # of another cluster and never a point already re-seeded
                candidates = np.where(counts[labels] > 1, assigned_d2, -np.inf)
                far = int(candidates.argmax())
                counts[labels[far]] -= 1
                counts[c] = 1
                centroids[c] = vectors[far]
                labels[far] = c
                assigned_d2[far] = -np.inf
        if prev is not None and (labels == prev).all():
            break
        prev = labels
        for c in range(k):
            centroids[c] = vectors[labels == c].mean(axis=0)
    return labels


@dataclass
class RaptorTree:
    """Summary levels above the leaves, with child-to-parent links."""

    doc_id: str
    levels: list[list[Chunk]]
    parents: dict[str, str] = field(default_factory=dict)

    @property
    def leaf_chunks(self) -> list[Chunk]:
        return self.levels[0]

    @property
    def summary_chunks(self) -> list[Chunk]:
        return [c for level in self.levels[1:] for c in level]

    @property
    def all_chunks(self) -> list[Chunk]:
        return [c for level in self.levels for c in level]


def raptor_build(
    leaf_chunks: Sequence[Chunk],
    embedder: Embedder,
    summarizer: Summarizer | None = None,
    config: RaptorConfig | None = None,
) -> RaptorTree:
    """Build the summary tree for one document's leaf chunks.

    Level sizes strictly decrease: each round clusters n chunks into
    ceil(n / fanout) groups. Recursion ends at a single top chunk or at
    ``max_depth`` levels of summaries, whichever comes first.
    """
    config = config or RaptorConfig()
    summarizer = summarizer or MockSummarizer()
    if not leaf_chunks:
        raise ValueError("leaf_chunks must be non-empty")
    doc_ids = {c.doc_id for c in leaf_chunks}
    if len(doc_ids) != 1:
        raise ValueError(f"leaf chunks span multiple documents: {sorted(doc_ids)}")
    if any(c.level != 0 for c in leaf_chunks):
        raise ValueError("leaf chunks must be level 0")
    doc_id = next(iter(doc_ids))

    tree = RaptorTree(doc_id=doc_id, levels=[list(leaf_chunks)])
    current = list(leaf_chunks)
    level = 0
    while len(current) > 1 and level < config.max_depth:
        vectors = np.stack([embed(c.text, embedder) for c in current])
        k = math.ceil(len(current) / config.fanout)
        labels = kmeans(
            vectors, k, seed=config.seed * 100003 + level, iters=config.kmeans_iters
        )
        next_level: list[Chunk] = []
        for c in range(k):
            members = [current[i] for i in np.flatnonzero(labels == c)]
            if not members:
                continue
            summary = Chunk(
                chunk_id=f"{doc_id}#s{level + 1}-{len(next_level):03d}",
                doc_id=doc_id,
                text=summarizer.summarize([m.text for m in members]),
                char_span=None,
                level=level + 1,
            )
            for m in members:
                tree.parents[m.chunk_id] = summary.chunk_id
            next_level.append(summary)
        tree.levels.append(next_level)
        logger.debug(
            "%s: level %d has %d summaries over %d chunks",
            doc_id, level + 1, len(next_level), len(current),
        )
        current = next_level
        level += 1
    return tree
