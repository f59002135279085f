"""Retrieval-augmented question answering over layout-parsed documents."""

from .chunking import Chunk, chunk_document, split_atomic_units
from .clustering import NOISE, DbscanParams, dbscan
from .config import PipelineConfig, load_config
from .datagen import (
    TrainingExample,
    assemble_example,
    export_dataset,
    generate_dataset,
    split_training_contexts,
)
from .embedding import MockEmbedder, cosine_similarity, embed
from .errors import PdfqaError
from .evaluate import (
    EvalCase,
    EvalReport,
    accuracy_at,
    answer_similarity,
    media_accuracy,
    run_eval,
)
from .furniture import (
    FurnitureFilterConfig,
    classify_clusters,
    min_samples_for,
    remove_headers_footers,
)
from .layout import BBox, Page, PageElement, SourceDocument, load_document
from .markdown import (
    ConverterConfig,
    ImageAsset,
    MarkdownDocument,
    TableRecord,
    convert,
    render_markdown_table,
)
from .media import (
    caption_images,
    compress_document_tables,
    compress_table,
    decompress_table,
    parse_markdown_table,
)
from .pipeline import index_chunks, ingest_corpus, query_index
from .qa import AssetCatalog, QAResult, Query, answer, build_prompt, recover_media, retrieve
from .raptor import RaptorConfig, RaptorTree, raptor_build
from .store import VectorStore
from .synthetic import (
    SyntheticDocSpec,
    build_synthetic_corpus,
    build_synthetic_document,
    write_synthetic_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "AssetCatalog",
    "BBox",
    "Chunk",
    "ConverterConfig",
    "DbscanParams",
    "EvalCase",
    "EvalReport",
    "FurnitureFilterConfig",
    "ImageAsset",
    "MarkdownDocument",
    "MockEmbedder",
    "NOISE",
    "Page",
    "PageElement",
    "PdfqaError",
    "PipelineConfig",
    "QAResult",
    "Query",
    "RaptorConfig",
    "RaptorTree",
    "SourceDocument",
    "SyntheticDocSpec",
    "TableRecord",
    "TrainingExample",
    "VectorStore",
    "accuracy_at",
    "answer",
    "answer_similarity",
    "assemble_example",
    "build_prompt",
    "build_synthetic_corpus",
    "build_synthetic_document",
    "caption_images",
    "chunk_document",
    "classify_clusters",
    "compress_document_tables",
    "compress_table",
    "convert",
    "cosine_similarity",
    "dbscan",
    "decompress_table",
    "embed",
    "export_dataset",
    "generate_dataset",
    "index_chunks",
    "ingest_corpus",
    "load_config",
    "load_document",
    "media_accuracy",
    "min_samples_for",
    "parse_markdown_table",
    "query_index",
    "raptor_build",
    "recover_media",
    "remove_headers_footers",
    "render_markdown_table",
    "retrieve",
    "run_eval",
    "split_atomic_units",
    "split_training_contexts",
    "write_synthetic_corpus",
]
