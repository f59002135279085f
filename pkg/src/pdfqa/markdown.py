"""Conversion of layout documents to markdown plus media assets.

The output triple is the markdown text, the extracted image assets,
and the structured table records. Image and table IDs are dense
sequences (image_1.png, table_1, ...) in reading order.
"""

from __future__ import annotations

import logging
import statistics
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import ConversionError
from .layout import BBox, PageElement, SourceDocument

logger = logging.getLogger(__name__)


@dataclass
class ImageAsset:
    """Extracted raster image. ``image_id`` includes the .png suffix."""

    image_id: str
    data: bytes
    page_index: int
    bbox: BBox
    caption: str | None = None


@dataclass
class TableRecord:
    """Structured table extracted from one page."""

    table_id: str
    columns: list[str]
    rows: list[list[str]]
    page_index: int
    bbox: BBox

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValueError(f"{self.table_id}: table must have at least one column")
        for r, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise ValueError(
                    f"{self.table_id}: row {r} has {len(row)} cells, expected {len(self.columns)}"
                )
        for cell in self._all_cells():
            if "\n" in cell:
                raise ValueError(f"{self.table_id}: cells must not contain raw newlines")

    def _all_cells(self):
        yield from self.columns
        for row in self.rows:
            yield from row


@dataclass
class MarkdownDocument:
    """The conversion result: text plus its media assets."""

    doc_id: str
    text: str
    images: list[ImageAsset] = field(default_factory=list)
    tables: list[TableRecord] = field(default_factory=list)


@dataclass(frozen=True)
class ConverterConfig:
    extract_images: bool = True
    image_dpi: int = 96  # informational only; recorded nowhere else
    paginate_output: bool = False
    heading_ratio: float = 1.3

    def __post_init__(self) -> None:
        if self.image_dpi < 1:
            raise ValueError("image_dpi must be >= 1")
        if not self.heading_ratio > 0:
            raise ValueError("heading_ratio must be positive")


def _escape_cell(cell: str) -> str:
    return cell.replace("|", "\\|")


def render_markdown_table(columns: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Canonical GitHub-style table: single-space padding, escaped pipes."""
    if not columns:
        raise ValueError("table must have at least one column")
    for r, row in enumerate(rows):
        if len(row) != len(columns):
            raise ValueError(f"row {r} has {len(row)} cells, expected {len(columns)}")
    for cell in list(columns) + [c for row in rows for c in row]:
        if "\n" in cell:
            raise ValueError("table cells must not contain raw newlines")
    lines = ["| " + " | ".join(_escape_cell(c) for c in columns) + " |"]
    lines.append("|" + " --- |" * len(columns))
    for row in rows:
        lines.append("| " + " | ".join(_escape_cell(c) for c in row) + " |")
    return "\n".join(lines)


def _reading_order(elements: list[PageElement]) -> list[PageElement]:
    # Stable sort: ties keep source order.
    return sorted(elements, key=lambda el: (el.bbox.y0, el.bbox.x0))


def _heading_threshold(doc: SourceDocument, ratio: float) -> float | None:
    sizes = [
        el.font_size
        for el in doc.iter_elements()
        if el.kind == "text" and el.font_size is not None
    ]
    if not sizes:
        return None
    return ratio * statistics.median(sizes)


def convert(doc: SourceDocument, config: ConverterConfig | None = None) -> MarkdownDocument:
    """Convert a document to its markdown/image/table triple.

    Reading order is page by page, top to bottom, left to right on y0
    ties. Text at or above ``heading_ratio`` times the median body font
    becomes a single-level heading. Image and drawing elements are kept
    only when they carry raster bytes.
    """
    config = config or ConverterConfig()
    threshold = _heading_threshold(doc, config.heading_ratio)

    images: list[ImageAsset] = []
    tables: list[TableRecord] = []
    page_blocks: list[str] = []

    for page in doc.pages:
        blocks: list[str] = []
        for el in _reading_order(page.elements):
            if el.kind == "text":
                assert el.text is not None
                if threshold is not None and el.font_size is not None and el.font_size >= threshold:
                    blocks.append(f"# {el.text}")
                else:
                    blocks.append(el.text)
            elif el.kind in ("image", "drawing"):
                if not config.extract_images:
                    continue
                if el.image_bytes is None:
                    logger.debug(
                        "dropping %s element without raster payload on page %d",
                        el.kind, page.index,
                    )
                    continue
                n = len(images) + 1
                image_id = f"image_{n}.png"
                images.append(
                    ImageAsset(
                        image_id=image_id,
                        data=el.image_bytes,
                        page_index=page.index,
                        bbox=el.bbox,
                    )
                )
                blocks.append(f"![image_{n}](image_{n}.png)")
            elif el.kind == "table":
                if el.table is None:
                    raise ConversionError(
                        f"table element without data on page {page.index} "
                        f"at bbox {el.bbox.as_tuple()}"
                    )
                columns = [" ".join(c.split()) for c in el.table.columns]
                rows = [[" ".join(c.split()) for c in row] for row in el.table.rows]
                if not columns:
                    raise ConversionError(
                        f"table with no columns on page {page.index} "
                        f"at bbox {el.bbox.as_tuple()}"
                    )
                for row in rows:
                    if len(row) != len(columns):
                        raise ConversionError(
                            f"ragged table on page {page.index} at bbox {el.bbox.as_tuple()}: "
                            f"row has {len(row)} cells, expected {len(columns)}"
                        )
                table_id = f"table_{len(tables) + 1}"
                record = TableRecord(
                    table_id=table_id,
                    columns=columns,
                    rows=rows,
                    page_index=page.index,
                    bbox=el.bbox,
                )
                tables.append(record)
                blocks.append(render_markdown_table(columns, rows))
        page_blocks.append("\n".join(blocks))

    if config.paginate_output:
        parts = [page_blocks[0]] if page_blocks else []
        for i, block in enumerate(page_blocks[1:], start=2):
            parts.append(f"<!-- page {i} -->")
            parts.append(block)
        text = "\n\n".join(parts)
    else:
        text = "\n\n".join(page_blocks)

    return MarkdownDocument(doc_id=doc.doc_id, text=text, images=images, tables=tables)


def set_caption(asset: ImageAsset, caption: str) -> ImageAsset:
    return replace(asset, caption=caption)
