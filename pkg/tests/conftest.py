from __future__ import annotations

import pytest

from pdfqa.markdown import ConverterConfig, convert
from pdfqa.media import MockCaptioner, caption_images, compress_document_tables
from pdfqa.furniture import FurnitureFilterConfig, remove_headers_footers
from pdfqa.synthetic import SyntheticDocSpec, build_synthetic_document


def enrich(doc):
    """Filter, convert, caption and compress one document."""
    cleaned = remove_headers_footers(doc, FurnitureFilterConfig())
    md = convert(cleaned, ConverterConfig())
    md = caption_images(md, MockCaptioner())
    return compress_document_tables(md)


@pytest.fixture
def rich_doc():
    spec = SyntheticDocSpec(
        pages=12,
        seed=7,
        doc_id="doc-rich",
        images_per_page=1,
        tables_per_page=1,
        heading_every=4,
    )
    doc, _ = build_synthetic_document(spec)
    return doc


@pytest.fixture
def rich_markdown(rich_doc):
    return enrich(rich_doc)
