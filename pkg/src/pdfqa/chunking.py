"""Greedy chunking over atomic markdown units.

A unit is one line (newline included), except that an image line and
its caption line travel together and a compressed table line is never
split. Chunks tile the source text exactly: concatenating chunk texts
in order reproduces the input byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass

from .media import CAPTION_LINE_RE, IMAGE_LINE_RE

DEFAULT_CHUNK_CHARS = 1000


@dataclass
class Chunk:
    """A contiguous piece of a document, or a summary above the leaves."""

    chunk_id: str
    doc_id: str
    text: str
    char_span: tuple[int, int] | None
    level: int = 0

    def __post_init__(self) -> None:
        if not self.chunk_id:
            raise ValueError("chunk_id must be non-empty")
        if self.level < 0:
            raise ValueError("level must be non-negative")
        if not self.text:
            raise ValueError(f"{self.chunk_id}: chunk text must be non-empty")
        if self.char_span is not None:
            start, end = self.char_span
            if not (0 <= start < end):
                raise ValueError(f"{self.chunk_id}: invalid char_span {self.char_span}")
            if end - start != len(self.text):
                raise ValueError(f"{self.chunk_id}: char_span does not match text length")


def split_atomic_units(text: str) -> list[str]:
    """Split text into the units chunking must never break apart."""
    if not text:
        return []
    parts = text.split("\n")
    lines = [p + "\n" for p in parts[:-1]]
    if parts[-1]:
        lines.append(parts[-1])

    units: list[str] = []
    i = 0
    while i < len(lines):
        line = lines[i]
        content = line[:-1] if line.endswith("\n") else line
        m = IMAGE_LINE_RE.match(content)
        if m and m.group(1) == m.group(2) and i + 1 < len(lines):
            next_line = lines[i + 1]
            next_content = next_line[:-1] if next_line.endswith("\n") else next_line
            cap = CAPTION_LINE_RE.match(next_content)
            if cap and cap.group(1) == m.group(1):
                units.append(line + next_line)
                i += 2
                continue
        units.append(line)
        i += 1
    return units


def is_atomic_chunk_text(text: str) -> bool:
    """True when the text is a single indivisible unit."""
    return len(split_atomic_units(text)) == 1


def chunk_document(doc_id: str, text: str, max_chars: int = DEFAULT_CHUNK_CHARS) -> list[Chunk]:
    """Pack atomic units greedily into chunks of at most ``max_chars``.

    A single unit longer than ``max_chars`` becomes its own oversized
    chunk; a compressed table line, for example, is indivisible.
    """
    if max_chars < 1:
        raise ValueError("max_chars must be >= 1")
    units = split_atomic_units(text)

    chunks: list[Chunk] = []
    buf: list[str] = []
    buf_len = 0
    offset = 0

    def flush() -> None:
        nonlocal buf, buf_len, offset
        if not buf:
            return
        chunk_text = "".join(buf)
        chunks.append(
            Chunk(
                chunk_id=f"{doc_id}#c{len(chunks):05d}",
                doc_id=doc_id,
                text=chunk_text,
                char_span=(offset, offset + len(chunk_text)),
            )
        )
        offset += len(chunk_text)
        buf = []
        buf_len = 0

    for unit in units:
        if buf and buf_len + len(unit) > max_chars:
            flush()
        buf.append(unit)
        buf_len += len(unit)
        if buf_len > max_chars:
            flush()
    flush()
    return chunks
