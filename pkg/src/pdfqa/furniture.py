"""Removal of repeated page furniture: headers and footers.

Element centroids, normalized to their own page size, are clustered
per window of consecutive pages. Tight clusters that sit in the top or
bottom band of the page and recur across enough distinct pages are
furniture; everything else is body content and survives untouched.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from .clustering import NOISE, DbscanParams, dbscan
from .layout import Page, SourceDocument

logger = logging.getLogger(__name__)

HEADER, FOOTER, BODY = "header", "footer", "body"


def min_samples_for(page_count: int) -> int:
    """Cluster density threshold scaled to document length."""
    if page_count < 1:
        raise ValueError("page_count must be >= 1")
    if page_count <= 6:
        return 2
    if page_count <= 8:
        return 3
    return 4


@dataclass(frozen=True)
class FurnitureFilterConfig:
    eps: float = 0.01
    top_band: float = 0.15
    bottom_band: float = 0.85
    window_size: int = 10
    min_pages_override: int | None = None

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if not (0.0 < self.top_band < self.bottom_band < 1.0):
            raise ValueError("bands must satisfy 0 < top_band < bottom_band < 1")
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if self.min_pages_override is not None and self.min_pages_override < 1:
            raise ValueError("min_pages_override must be >= 1")


def classify_clusters(
    centroids: Sequence[tuple[float, float]],
    page_indices: Sequence[int],
    labels: Sequence[int],
    min_pages: int,
    top_band: float = 0.15,
    bottom_band: float = 0.85,
) -> list[str]:
    """Mark each element as header, footer, or body.

    A cluster is furniture only when its mean normalized y falls inside
    one of the edge bands and its members span at least ``min_pages``
    distinct pages. Noise is always body.
    """
    if not (len(centroids) == len(page_indices) == len(labels)):
        raise ValueError("centroids, page_indices, and labels must align")
    members: dict[int, list[int]] = {}
    for i, lbl in enumerate(labels):
        if lbl != NOISE:
            members.setdefault(lbl, []).append(i)

    cluster_mark: dict[int, str] = {}
    for lbl, idxs in members.items():
        mean_y = sum(centroids[i][1] for i in idxs) / len(idxs)
        span = len({page_indices[i] for i in idxs})
        mark = BODY
        if span >= min_pages:
            if mean_y <= top_band:
                mark = HEADER
            elif mean_y >= bottom_band:
                mark = FOOTER
        cluster_mark[lbl] = mark

    return [BODY if lbl == NOISE else cluster_mark[lbl] for lbl in labels]


def remove_headers_footers(
    doc: SourceDocument, config: FurnitureFilterConfig | None = None
) -> SourceDocument:
    """Strip repeated headers and footers from a document.

    Documents of one or two pages are returned unchanged: there is not
    enough repetition to tell furniture from content. Surviving element
    objects are the same objects held by the input document.
    """
    config = config or FurnitureFilterConfig()
    if doc.page_count <= 2:
        return doc

    min_samples = min_samples_for(doc.page_count)
    min_pages = (
        config.min_pages_override if config.min_pages_override is not None else min_samples
    )
    params = DbscanParams(eps=config.eps, min_samples=min_samples)

    drop: set[int] = set()
    for start in range(0, doc.page_count, config.window_size):
        window = doc.pages[start : start + config.window_size]
        elements = [el for page in window for el in page.elements]
        if not elements:
            continue
        dims = {page.index: (page.width, page.height) for page in window}
        centroids = []
        page_indices = []
        for el in elements:
            w, h = dims[el.page_index]
            cx, cy = el.bbox.center
            centroids.append((cx / w, cy / h))
            page_indices.append(el.page_index)
        labels = dbscan(centroids, params)
        marks = classify_clusters(
            centroids, page_indices, labels, min_pages, config.top_band, config.bottom_band
        )
        for el, mark in zip(elements, marks):
            if mark != BODY:
                drop.add(id(el))

    if not drop:
        return doc
    logger.debug("dropping %d furniture elements from %s", len(drop), doc.doc_id)
    pages = [
        Page(
            index=page.index,
            width=page.width,
            height=page.height,
            elements=[el for el in page.elements if id(el) not in drop],
        )
        for page in doc.pages
    ]
    return SourceDocument(doc_id=doc.doc_id, pages=pages)
