"""Exception hierarchy shared across the package."""

from __future__ import annotations


class PdfqaError(Exception):
    """Base class for all package errors."""


class DocumentLoadError(PdfqaError):
    """A source document could not be read or parsed."""


class ConversionError(PdfqaError):
    """Markdown conversion failed for a document element."""


class TableParseError(PdfqaError):
    """A markdown table or its compressed form could not be parsed."""


class EmbeddingError(PdfqaError):
    """An embedding could not be produced or failed validation."""


class DimensionMismatchError(PdfqaError):
    """Vector dimensions disagree with the store or embedder. Fatal."""


class StoreError(PdfqaError):
    """Vector store constraint violation."""


class EmptyIndexError(StoreError):
    """Search was attempted against an empty index."""


class ServiceError(PdfqaError):
    """A model service returned an unusable response."""


class RetriableServiceError(ServiceError):
    """Transient service failure; the call may be retried."""


class PromptError(PdfqaError):
    """A prompt template is malformed."""


class AnswerError(PdfqaError):
    """The LLM call failed after retrieval succeeded.

    Carries the retrieval result so callers can still inspect what the
    index returned for the question.
    """

    def __init__(self, message: str, retrieved=None):
        super().__init__(message)
        self.retrieved = list(retrieved) if retrieved else []


class DatagenError(PdfqaError):
    """Training data generation constraint violation."""


class ConfigError(PdfqaError):
    """Invalid pipeline configuration."""


class IngestError(PdfqaError):
    """Corpus ingestion could not produce an index."""
