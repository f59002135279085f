"""Media enrichment: image captions and compact table text.

Tables travel through the index as single-line records shaped like

    [table_1] {"columns":["A","B"],"rows":[["1","2"]]}

which are cheaper to store than rendered markdown and trivially
reversible. Captions are inserted directly below each image line as

    Caption [image_1.png]: <caption text>
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import replace
from typing import Protocol

from .errors import TableParseError
from .markdown import MarkdownDocument, render_markdown_table

logger = logging.getLogger(__name__)

CAPTION_UNAVAILABLE = "(caption unavailable)"

IMAGE_LINE_RE = re.compile(r"^!\[image_(\d+)\]\(image_(\d+)\.png\)$")
CAPTION_LINE_RE = re.compile(r"^Caption \[image_(\d+)\.png\]: ")
DICT_TABLE_LINE_RE = re.compile(r"^\[(table_\d+)\] (\{.*\})$")

_SEPARATOR_ROW_RE = re.compile(r"^\|( ?:?-{3,}:? ?\|)+$")
# Split on pipes that are not escaped with a backslash.
_CELL_SPLIT_RE = re.compile(r"(?<!\\)\|")


class Captioner(Protocol):
    """Anything that can produce a caption for raster image bytes."""

    def caption(self, image_id: str, data: bytes) -> str: ...


class MockCaptioner:
    """Offline captioner: a stable digest of the image bytes.

    Identical bytes always yield the identical caption, which makes
    captions usable as deterministic retrieval targets in tests.
    """

    def caption(self, image_id: str, data: bytes) -> str:
        digest = hashlib.sha256(data).hexdigest()[:8]
        return f"Figure with content signature {digest}."


def caption_images(md: MarkdownDocument, captioner: Captioner) -> MarkdownDocument:
    """Insert a caption line below every image line.

    Already-captioned images are left alone, so applying this twice is
    the same as applying it once. A captioner failure inserts
    "(caption unavailable)" and logs a warning; the document is never
    abandoned. All non-caption lines survive byte-exactly.
    """
    captions: dict[str, str] = {}
    new_assets = []
    for asset in md.images:
        try:
            text = captioner.caption(asset.image_id, asset.data)
            text = " ".join(text.split())  # force a single paragraph
            if not text:
                raise ValueError("captioner returned empty text")
        except Exception as exc:
            logger.warning("captioner failed for %s: %s", asset.image_id, exc)
            text = CAPTION_UNAVAILABLE
        captions[asset.image_id] = text
        new_assets.append(replace(asset, caption=text))

    lines = md.text.split("\n")
    out: list[str] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        out.append(line)
        m = IMAGE_LINE_RE.match(line)
        if m and m.group(1) == m.group(2):
            image_id = f"image_{m.group(1)}.png"
            if image_id in captions:
                next_line = lines[i + 1] if i + 1 < len(lines) else ""
                if next_line.startswith(f"Caption [{image_id}]: "):
                    out.append(next_line)
                    i += 1
                else:
                    out.append(f"Caption [{image_id}]: {captions[image_id]}")
        i += 1
    return MarkdownDocument(
        doc_id=md.doc_id, text="\n".join(out), images=new_assets, tables=list(md.tables)
    )


def _unescape_cell(cell: str) -> str:
    return cell.replace("\\|", "|")


def parse_markdown_table(text: str) -> tuple[list[str], list[list[str]]]:
    """Parse a GitHub-style table into (columns, rows).

    Accepts arbitrary cell padding and alignment markers in the
    separator row. Errors name the offending row.
    """
    lines = [ln for ln in text.strip("\n").split("\n") if ln.strip()]
    if len(lines) < 2:
        raise TableParseError("table needs a header row and a separator row")
    if not _SEPARATOR_ROW_RE.match(lines[1].replace(" ", "")):
        raise TableParseError(f"row 1 is not a separator row: {lines[1]!r}")

    def split_row(line: str, row_num: int) -> list[str]:
        body = line.strip()
        if not body.startswith("|") or not body.endswith("|") or len(body) < 2:
            raise TableParseError(f"row {row_num} is not pipe-delimited: {line!r}")
        cells = _CELL_SPLIT_RE.split(body)[1:-1]
        return [_unescape_cell(c.strip()) for c in cells]

    columns = split_row(lines[0], 0)
    if not columns:
        raise TableParseError("table has no columns")
    rows = []
    for r, line in enumerate(lines[2:], start=2):
        row = split_row(line, r)
        if len(row) != len(columns):
            raise TableParseError(
                f"row {r} has {len(row)} cells, expected {len(columns)}"
            )
        rows.append(row)
    return columns, rows


def compress_table(markdown_table: str, table_id: str) -> str:
    """Compress a markdown table into its single-line record form."""
    if not re.fullmatch(r"table_\d+", table_id):
        raise ValueError(f"invalid table id: {table_id!r}")
    columns, rows = parse_markdown_table(markdown_table)
    payload = json.dumps(
        {"columns": columns, "rows": rows}, ensure_ascii=False, separators=(",", ":")
    )
    return f"[{table_id}] {payload}"


def parse_dict_table_line(line: str) -> tuple[str, list[str], list[list[str]]]:
    """Split a compressed table line into (table_id, columns, rows)."""
    m = DICT_TABLE_LINE_RE.match(line)
    if not m:
        raise TableParseError(f"not a compressed table line: {line[:80]!r}")
    table_id, payload = m.group(1), m.group(2)
    offset = m.start(2)
    try:
        data = json.loads(payload)
    except json.JSONDecodeError as exc:
        raise TableParseError(
            f"malformed table payload at byte {offset + exc.pos}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict) or set(data) != {"columns", "rows"}:
        raise TableParseError(
            f"table payload at byte {offset} must have exactly the keys "
            f"'columns' and 'rows'"
        )
    columns, rows = data["columns"], data["rows"]
    if not (isinstance(columns, list) and all(isinstance(c, str) for c in columns)):
        raise TableParseError(f"table payload at byte {offset}: columns must be strings")
    if not isinstance(rows, list):
        raise TableParseError(f"table payload at byte {offset}: rows must be a list")
    for r, row in enumerate(rows):
        if not (isinstance(row, list) and all(isinstance(c, str) for c in row)):
            raise TableParseError(
                f"table payload at byte {offset}: row {r} must be a list of strings"
            )
        if len(row) != len(columns):
            raise TableParseError(
                f"table payload at byte {offset}: row {r} has {len(row)} cells, "
                f"expected {len(columns)}"
            )
    return table_id, columns, rows


def decompress_table(line: str) -> str:
    """Expand a compressed table line back into canonical markdown."""
    _, columns, rows = parse_dict_table_line(line)
    return render_markdown_table(columns, rows)


def compress_document_tables(md: MarkdownDocument) -> MarkdownDocument:
    """Replace every rendered table block in the text with its record line.

    Blocks are located in reading order; each must start at a line
    boundary exactly as the converter emitted it.
    """
    text = md.text
    pos = 0
    for record in md.tables:
        block = render_markdown_table(record.columns, record.rows)
        idx = text.find(block, pos)
        while idx > 0 and text[idx - 1] != "\n":
            idx = text.find(block, idx + 1)
        if idx == -1:
            raise TableParseError(
                f"table block for {record.table_id} not found in document text"
            )
        line = compress_table(block, record.table_id)
        text = text[:idx] + line + text[idx + len(block):]
        pos = idx + len(line)
    return MarkdownDocument(
        doc_id=md.doc_id, text=text, images=list(md.images), tables=list(md.tables)
    )
