"""End-to-end ingest, query, and data generation used by the CLI."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

from .chunking import Chunk, chunk_document
from .config import PipelineConfig
from .datagen import TrainingExample, generate_dataset
from .embedding import Embedder, embed
from .errors import IngestError, StoreError
from .furniture import remove_headers_footers
from .layout import load_document
from .llm import LlmClient
from .markdown import MarkdownDocument, convert
from .media import Captioner, caption_images, compress_document_tables
from .qa import AssetCatalog, QAResult, Query, answer
from .raptor import MockSummarizer, raptor_build
from .services import (
    resolve_agen,
    resolve_captioner,
    resolve_embedder,
    resolve_llm,
    resolve_qgen,
)
from .store import VectorStore
from .synthetic import SyntheticJsonBackend

logger = logging.getLogger(__name__)

STORE_FILENAME = "store.jsonl"


@dataclass
class IngestDocReport:
    doc_id: str
    pages: int
    elements: int
    chunks: int
    images: int
    tables: int


def index_chunks(chunks: list[Chunk], embedder: Embedder, store: VectorStore) -> None:
    """Embed and add chunks; re-indexing a document replaces its entries.

    All chunks of one document (leaves and summaries together) must
    arrive in a single call, because each call wipes the prior entries
    of every document it touches.
    """
    ids = [c.chunk_id for c in chunks]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise StoreError(f"duplicate chunk_id in one indexing call: {dupes}")
    for doc_id in {c.doc_id for c in chunks}:
        removed = store.delete_doc(doc_id)
        if removed:
            logger.info("re-indexing %s: removed %d prior entries", doc_id, removed)
    for chunk in chunks:
        store.add(chunk, embed(chunk.text, embedder))


def _enrich(doc, config: PipelineConfig, captioner: Captioner) -> MarkdownDocument:
    cleaned = remove_headers_footers(doc, config.furniture_config())
    md = convert(cleaned, config.converter_config())
    md = caption_images(md, captioner)
    return compress_document_tables(md)


def enrich_document(
    path: Path,
    config: PipelineConfig,
    captioner: Captioner,
) -> MarkdownDocument:
    """Load one corpus file and run it through cleanup and enrichment."""
    doc = load_document(path, SyntheticJsonBackend())
    return _enrich(doc, config, captioner)


def _write_doc_outputs(out_dir: Path, md: MarkdownDocument) -> None:
    doc_dir = out_dir / md.doc_id
    doc_dir.mkdir(parents=True, exist_ok=True)
    (doc_dir / "document.md").write_text(md.text, encoding="utf-8")
    if md.images:
        images_dir = doc_dir / "images"
        images_dir.mkdir(exist_ok=True)
        for asset in md.images:
            (images_dir / asset.image_id).write_bytes(asset.data)


def ingest_corpus(
    corpus_dir: str | Path,
    out_dir: str | Path,
    config: PipelineConfig,
    embedder: Embedder | None = None,
    captioner: Captioner | None = None,
) -> tuple[VectorStore, list[IngestDocReport], list[tuple[Path, Exception]]]:
    """Ingest every corpus document into a fresh index under ``out_dir``.

    Per-document failures are collected, not fatal; the run fails only
    when no document survives. Output bytes are deterministic for a
    fixed corpus, config, and seed.
    """
    corpus_dir = Path(corpus_dir)
    out_dir = Path(out_dir)
    if not corpus_dir.is_dir():
        raise IngestError(f"corpus directory not found: {corpus_dir}")
    paths = sorted(corpus_dir.glob("*.json"))
    if not paths:
        raise IngestError(f"no corpus documents found in {corpus_dir}")

    embedder = embedder or resolve_embedder(
        config.embedder_url, dim=config.embed_dim, seed=config.seed
    )
    captioner = captioner or resolve_captioner(config.captioner_url)
    out_dir.mkdir(parents=True, exist_ok=True)

    store = VectorStore()
    reports: list[IngestDocReport] = []
    failures: list[tuple[Path, Exception]] = []
    for path in paths:
        try:
            doc = load_document(path, SyntheticJsonBackend())
            md = _enrich(doc, config, captioner)
            leaves = chunk_document(md.doc_id, md.text, config.max_chars)
            chunks = list(leaves)
            if config.raptor_enabled and leaves:
                tree = raptor_build(
                    leaves,
                    embedder,
                    MockSummarizer(),
                    config.raptor_config(),
                )
                chunks.extend(tree.summary_chunks)
            if chunks:
                index_chunks(chunks, embedder, store)
            _write_doc_outputs(out_dir, md)
            reports.append(
                IngestDocReport(
                    doc_id=md.doc_id,
                    pages=doc.page_count,
                    elements=sum(len(p.elements) for p in doc.pages),
                    chunks=len(chunks),
                    images=len(md.images),
                    tables=len(md.tables),
                )
            )
        except Exception as exc:
            logger.error("ingest failed for %s: %s", path.name, exc)
            failures.append((path, exc))

    if not reports:
        raise IngestError(f"all {len(paths)} documents failed to ingest")
    store.save(out_dir / STORE_FILENAME)
    return store, reports, failures


def query_index(
    index_dir: str | Path,
    question: str,
    config: PipelineConfig,
    embedder: Embedder | None = None,
    llm: LlmClient | None = None,
) -> QAResult:
    """Answer one question against a previously ingested index."""
    index_dir = Path(index_dir)
    store = VectorStore.load(index_dir / STORE_FILENAME)
    embedder = embedder or resolve_embedder(
        config.embedder_url, dim=config.embed_dim, seed=config.seed
    )
    llm = llm or resolve_llm(config.llm_url)
    catalog = AssetCatalog(index_dir)
    return answer(
        Query(text=question, k=config.k),
        store,
        embedder,
        llm,
        catalog=catalog,
        max_tokens=config.max_tokens,
    )


def generate_corpus_dataset(
    corpus_dir: str | Path,
    config: PipelineConfig,
    captioner: Captioner | None = None,
    qgen: LlmClient | None = None,
    agen: LlmClient | None = None,
) -> list[TrainingExample]:
    """Run enrichment over the corpus, then the full datagen path."""
    corpus_dir = Path(corpus_dir)
    if not corpus_dir.is_dir():
        raise IngestError(f"corpus directory not found: {corpus_dir}")
    paths = sorted(corpus_dir.glob("*.json"))
    if not paths:
        raise IngestError(f"no corpus documents found in {corpus_dir}")
    captioner = captioner or resolve_captioner(config.captioner_url)
    qgen = qgen or resolve_qgen(config.qgen_url)
    agen = agen or resolve_agen(config.agen_url)

    docs: list[tuple[str, str]] = []
    for path in paths:
        md = enrich_document(path, config, captioner)
        docs.append((md.doc_id, md.text))
    return generate_dataset(
        docs,
        qgen,
        agen,
        seed=config.seed,
        questions_per_context=config.questions_per_context,
        context_size=config.context_size,
    )
