"""Top-k retrieval, prompt assembly, answering, and media recovery."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .chunking import Chunk
from .embedding import Embedder, embed
from .errors import AnswerError, TableParseError
from .llm import LlmClient
from .media import DICT_TABLE_LINE_RE, decompress_table, parse_dict_table_line
from .prompts import (
    CHUNK_HEADER_FORMAT,
    EMPTY_CONTEXT,
    QA_PROMPT_TEMPLATE,
    fill_template,
    validate_template,
)
from .store import VectorStore

logger = logging.getLogger(__name__)

BRACKETED_IMAGE_RE = re.compile(r"\[(image_\d+\.png)\]")


@dataclass(frozen=True)
class Query:
    """A trimmed, non-empty question with the number of chunks to pull."""

    text: str
    k: int = 10

    def __post_init__(self) -> None:
        trimmed = self.text.strip()
        if not trimmed:
            raise ValueError("query text must be non-empty")
        object.__setattr__(self, "text", trimmed)
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass
class QAResult:
    """Everything the pipeline produced for one question."""

    answer_text: str
    raw_answer: str
    retrieved: list[tuple[str, float]]
    resolved_images: list[tuple[str, str]] = field(default_factory=list)
    resolved_tables: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "answer_text": self.answer_text,
            "raw_answer": self.raw_answer,
            "retrieved": [[cid, score] for cid, score in self.retrieved],
            "resolved_images": [[iid, path] for iid, path in self.resolved_images],
            "resolved_tables": list(self.resolved_tables),
        }


def retrieve(query: Query, store: VectorStore, embedder: Embedder) -> list[tuple[Chunk, float]]:
    """Embed the query and return the top-k chunks with scores."""
    vec = embed(query.text, embedder)
    return store.search(vec, query.k)


def build_prompt(question: str, chunks: list[Chunk], template: str = QA_PROMPT_TEMPLATE) -> str:
    """Assemble the QA prompt with rank-labelled context chunks."""
    validate_template(template)
    if chunks:
        blocks = [
            CHUNK_HEADER_FORMAT.format(rank=i) + "\n" + c.text
            for i, c in enumerate(chunks, start=1)
        ]
        context = "\n".join(blocks)
    else:
        context = EMPTY_CONTEXT
    return fill_template(template, context=context, question=question)


class AssetCatalog:
    """Maps media IDs to image files under an ingest output directory.

    Image IDs restart at 1 for every document, so lookups take the
    documents to prefer (in rank order); outside that, the document
    with the lowest ID wins, keeping resolution deterministic.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._by_image: dict[str, dict[str, Path]] = {}
        for path in sorted(self.root.glob("*/images/image_*.png")):
            doc_id = path.parent.parent.name
            self._by_image.setdefault(path.name, {})[doc_id] = path

    def resolve_image(self, image_id: str, preferred_docs: tuple[str, ...] = ()) -> Path | None:
        candidates = self._by_image.get(image_id)
        if not candidates:
            return None
        for doc_id in preferred_docs:
            if doc_id in candidates:
                return candidates[doc_id]
        return candidates[min(candidates)]

    def __len__(self) -> int:
        return sum(len(v) for v in self._by_image.values())


def recover_media(
    answer: str,
    catalog: AssetCatalog | None = None,
    preferred_docs: tuple[str, ...] = (),
) -> tuple[str, list[tuple[str, str]], list[str]]:
    """Expand media references in an answer back into usable form.

    Compressed table lines become markdown tables again. Bracketed
    image IDs that resolve against the catalog become image links;
    unresolved ones stay verbatim with a warning. Running this on its
    own output changes nothing.
    """
    lines = answer.split("\n")
    out_lines: list[str] = []
    resolved_tables: list[str] = []
    for line in lines:
        m = DICT_TABLE_LINE_RE.match(line)
        if m:
            try:
                table_id, _, _ = parse_dict_table_line(line)
                out_lines.append(decompress_table(line))
                resolved_tables.append(table_id)
                continue
            except TableParseError as exc:
                logger.warning("table line left as-is: %s", exc)
        out_lines.append(line)
    text = "\n".join(out_lines)

    resolved_images: list[tuple[str, str]] = []
    seen: dict[str, str | None] = {}

    def _sub(match: re.Match) -> str:
        image_id = match.group(1)
        if image_id not in seen:
            path = catalog.resolve_image(image_id, preferred_docs) if catalog else None
            if path is None:
                logger.warning("unresolved image reference %s", match.group(0))
                seen[image_id] = None
            else:
                seen[image_id] = str(path)
                resolved_images.append((image_id, str(path)))
        resolved = seen[image_id]
        if resolved is None:
            return match.group(0)
        stem = image_id.rsplit(".", 1)[0]
        return f"![{stem}]({resolved})"

    text = BRACKETED_IMAGE_RE.sub(_sub, text)
    return text, resolved_images, resolved_tables


def answer(
    query: Query,
    store: VectorStore,
    embedder: Embedder,
    llm: LlmClient,
    catalog: AssetCatalog | None = None,
    template: str = QA_PROMPT_TEMPLATE,
    max_tokens: int = 512,
) -> QAResult:
    """Run the full question path: retrieve, prompt, complete, recover.

    An LLM failure raises AnswerError carrying the retrieval result, so
    callers can still see what the index produced.
    """
    retrieved = retrieve(query, store, embedder)
    pairs = [(c.chunk_id, score) for c, score in retrieved]
    prompt = build_prompt(query.text, [c for c, _ in retrieved], template)
    try:
        raw = llm.complete(prompt, max_tokens=max_tokens)
    except Exception as exc:
        raise AnswerError(f"LLM call failed: {exc}", retrieved=pairs) from exc

    preferred = tuple(dict.fromkeys(c.doc_id for c, _ in retrieved))
    text, images, tables = recover_media(raw, catalog, preferred)
    return QAResult(
        answer_text=text,
        raw_answer=raw,
        retrieved=pairs,
        resolved_images=images,
        resolved_tables=tables,
    )
