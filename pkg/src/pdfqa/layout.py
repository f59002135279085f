"""Geometric document model: pages, elements, and document loading."""

from __future__ import annotations

import base64
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Protocol

from .errors import DocumentLoadError

ELEMENT_KINDS = ("text", "image", "table", "drawing")


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box in page points. Origin is the top-left corner."""

    x0: float
    y0: float
    x1: float
    y1: float

    def __post_init__(self) -> None:
        for v in (self.x0, self.y0, self.x1, self.y1):
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"bbox coordinates must be finite and non-negative: {self}")
        if not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"degenerate bbox: {self}")

    @property
    def center(self) -> tuple[float, float]:
        return ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x0, self.y0, self.x1, self.y1)


@dataclass
class TableData:
    """Structured table payload attached to a table element.

    Shape problems (ragged rows, missing header) are reported at
    conversion time, where the page and bbox are known, so this type
    stays permissive.
    """

    columns: list[str]
    rows: list[list[str]]


@dataclass
class PageElement:
    """One laid-out element on a page."""

    page_index: int
    bbox: BBox
    kind: str
    text: str | None = None
    font_size: float | None = None
    image_bytes: bytes | None = None
    table: TableData | None = None

    def __post_init__(self) -> None:
        if self.kind not in ELEMENT_KINDS:
            raise ValueError(f"unknown element kind: {self.kind!r}")
        if self.page_index < 0:
            raise ValueError("page_index must be non-negative")
        if self.kind == "text" and not self.text:
            raise ValueError("text elements must carry text")
        if self.font_size is not None and self.font_size <= 0:
            raise ValueError("font_size must be positive")


@dataclass
class Page:
    """A page with fixed dimensions and its elements in source order."""

    index: int
    width: float
    height: float
    elements: list[PageElement] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("page index must be non-negative")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("page dimensions must be positive")
        for el in self.elements:
            self._validate_element(el)

    def _validate_element(self, el: PageElement) -> None:
        if el.page_index != self.index:
            raise ValueError(
                f"element page_index {el.page_index} does not match page {self.index}"
            )
        if el.bbox.x1 > self.width or el.bbox.y1 > self.height:
            raise ValueError(f"element bbox {el.bbox} exceeds page bounds")

    def add(self, el: PageElement) -> None:
        self._validate_element(el)
        self.elements.append(el)


@dataclass
class SourceDocument:
    """A parsed document: ordered pages of ordered elements."""

    doc_id: str
    pages: list[Page]

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        for i, page in enumerate(self.pages):
            if page.index != i:
                raise ValueError("page indices must run 0..n-1 in order")

    @property
    def page_count(self) -> int:
        return len(self.pages)

    def iter_elements(self) -> Iterator[PageElement]:
        for page in self.pages:
            yield from page.elements

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "pages": [_page_to_dict(p) for p in self.pages],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SourceDocument":
        return cls(
            doc_id=data["doc_id"],
            pages=[_page_from_dict(p) for p in data["pages"]],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), ensure_ascii=False), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "SourceDocument":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _element_to_dict(el: PageElement) -> dict:
    out: dict = {
        "page_index": el.page_index,
        "bbox": list(el.bbox.as_tuple()),
        "kind": el.kind,
    }
    if el.text is not None:
        out["text"] = el.text
    if el.font_size is not None:
        out["font_size"] = el.font_size
    if el.image_bytes is not None:
        out["image_bytes"] = base64.b64encode(el.image_bytes).decode("ascii")
    if el.table is not None:
        out["table"] = {"columns": el.table.columns, "rows": el.table.rows}
    return out


def _element_from_dict(data: dict) -> PageElement:
    table = None
    if "table" in data:
        table = TableData(columns=data["table"]["columns"], rows=data["table"]["rows"])
    raw = data.get("image_bytes")
    return PageElement(
        page_index=data["page_index"],
        bbox=BBox(*data["bbox"]),
        kind=data["kind"],
        text=data.get("text"),
        font_size=data.get("font_size"),
        image_bytes=base64.b64decode(raw) if raw is not None else None,
        table=table,
    )


def _page_to_dict(page: Page) -> dict:
    return {
        "index": page.index,
        "width": page.width,
        "height": page.height,
        "elements": [_element_to_dict(el) for el in page.elements],
    }


def _page_from_dict(data: dict) -> Page:
    return Page(
        index=data["index"],
        width=data["width"],
        height=data["height"],
        elements=[_element_from_dict(el) for el in data["elements"]],
    )


class ParserBackend(Protocol):
    """Anything that can turn a file into a SourceDocument."""

    def parse(self, path: Path) -> SourceDocument: ...


def load_document(path: str | Path, backend: ParserBackend) -> SourceDocument:
    """Parse one document file through the given backend.

    Raises DocumentLoadError for unreadable files and for documents
    with zero pages; element order within each page is preserved
    exactly as the backend produced it.
    """
    path = Path(path)
    if not path.is_file():
        raise DocumentLoadError(f"unreadable document: {path} does not exist")
    try:
        doc = backend.parse(path)
    except DocumentLoadError:
        raise
    except Exception as exc:
        raise DocumentLoadError(f"unreadable document: {path}: {exc}") from exc
    if doc.page_count == 0:
        raise DocumentLoadError(f"document has zero pages: {path}")
    return doc
