"""Deterministic synthetic documents with ground-truth furniture labels.

The builder fabricates letter-sized documents with repeated headers and
footers at stable positions plus randomly placed body content, and
returns per-element labels so filter quality can be measured exactly.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DocumentLoadError
from .furniture import BODY, FOOTER, HEADER
from .layout import BBox, Page, PageElement, SourceDocument, TableData

_VOCAB = (
    "pressure", "valve", "sensor", "calibration", "threshold", "module",
    "voltage", "housing", "manifold", "telemetry", "baseline", "gasket",
    "torque", "spindle", "coolant", "firmware", "latency", "bracket",
    "polymer", "turbine", "readout", "fixture", "tolerance", "bearing",
    "diagnostic", "inlet", "outlet", "compressor", "filter", "actuator",
    "relay", "conduit", "flange", "rotor", "stator", "damper", "nozzle",
    "enclosure", "harness", "regulator",
)


@dataclass(frozen=True)
class SyntheticDocSpec:
    """Recipe for one synthetic document."""

    pages: int
    seed: int = 0
    doc_id: str | None = None
    header_y: float | None = 0.04
    footer_y: float | None = 0.96
    body_elements_per_page: int = 8
    images_per_page: int = 0
    tables_per_page: int = 0
    heading_every: int = 0
    page_width: float = 612.0
    page_height: float = 792.0
    jitter: float = 0.002

    def __post_init__(self) -> None:
        if self.pages < 1:
            raise ValueError("pages must be >= 1")
        if self.body_elements_per_page < 0 or self.images_per_page < 0 or self.tables_per_page < 0:
            raise ValueError("element counts must be non-negative")
        for band in (self.header_y, self.footer_y):
            if band is not None and not (0.0 < band < 1.0):
                raise ValueError("header_y/footer_y must be normalized positions in (0, 1)")
        if self.jitter < 0 or self.jitter > 0.05:
            raise ValueError("jitter must be in [0, 0.05]")

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value != f.default:
                out[f.name] = value
        out["pages"] = self.pages
        out["seed"] = self.seed
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticDocSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown synthetic spec keys: {sorted(unknown)}")
        if "pages" not in data:
            raise ValueError("synthetic spec requires a page count")
        return cls(**data)


def _sentence(rng: random.Random, doc_id: str, page_num: int, tag: str) -> str:
    words = " ".join(rng.choice(_VOCAB) for _ in range(rng.randint(7, 13)))
    return f"{doc_id} page {page_num} {tag}: {words}."


def _box_around(
    cx: float, cy: float, w: float, h: float, page_w: float, page_h: float
) -> BBox:
    x0 = min(max(cx - w / 2, 0.0), page_w - w)
    y0 = min(max(cy - h / 2, 0.0), page_h - h)
    return BBox(x0, y0, x0 + w, y0 + h)


def build_synthetic_document(
    spec: SyntheticDocSpec,
) -> tuple[SourceDocument, list[list[str]]]:
    """Build one document; returns it with per-element ground-truth labels.

    Labels align positionally with each page's element list. Identical
    specs produce identical documents, element contents included.
    """
    rng = random.Random(spec.seed)
    doc_id = spec.doc_id or f"synth-{spec.seed:04d}"
    pw, ph = spec.page_width, spec.page_height
    header_text = f"{doc_id} maintenance handbook"

    pages: list[Page] = []
    labels: list[list[str]] = []
    for p in range(spec.pages):
        elements: list[PageElement] = []
        page_labels: list[str] = []

        def jittered(nx: float, ny: float) -> tuple[float, float]:
            return (
                (nx + rng.uniform(-spec.jitter, spec.jitter)) * pw,
                (ny + rng.uniform(-spec.jitter, spec.jitter)) * ph,
            )

        if spec.header_y is not None:
            cx, cy = jittered(0.5, spec.header_y)
            elements.append(
                PageElement(p, _box_around(cx, cy, 220, 11, pw, ph), "text",
                            text=header_text, font_size=9.0)
            )
            page_labels.append(HEADER)

        if spec.heading_every and p % spec.heading_every == 0:
            cx, cy = jittered(0.35, rng.uniform(0.20, 0.30))
            elements.append(
                PageElement(p, _box_around(cx, cy, 300, 22, pw, ph), "text",
                            text=f"Section {p + 1}: {rng.choice(_VOCAB)} overview",
                            font_size=16.0)
            )
            page_labels.append(BODY)

        for i in range(spec.body_elements_per_page):
            cx = rng.uniform(0.25, 0.65) * pw
            cy = rng.uniform(0.20, 0.80) * ph
            elements.append(
                PageElement(p, _box_around(cx, cy, rng.uniform(260, 380), rng.uniform(12, 36), pw, ph),
                            "text", text=_sentence(rng, doc_id, p + 1, f"item {i + 1}"),
                            font_size=10.0)
            )
            page_labels.append(BODY)

        for k in range(spec.images_per_page):
            cx = rng.uniform(0.3, 0.6) * pw
            cy = rng.uniform(0.25, 0.75) * ph
            payload = hashlib.sha256(f"{doc_id}/page{p}/image{k}".encode()).digest()
            elements.append(
                PageElement(p, _box_around(cx, cy, 150, 100, pw, ph), "image",
                            image_bytes=payload)
            )
            page_labels.append(BODY)

        for k in range(spec.tables_per_page):
            cx = rng.uniform(0.3, 0.6) * pw
            cy = rng.uniform(0.25, 0.75) * ph
            rows = [
                [
                    rng.choice(_VOCAB),
                    str(rng.randint(1, 9999)),
                    f"{doc_id} table {p + 1}-{k + 1} row {r + 1} "
                    f"{rng.choice(_VOCAB)} {rng.choice(_VOCAB)}",
                ]
                for r in range(3)
            ]
            elements.append(
                PageElement(p, _box_around(cx, cy, 280, 90, pw, ph), "table",
                            table=TableData(columns=["item", "value", "notes"], rows=rows))
            )
            page_labels.append(BODY)

        if spec.footer_y is not None:
            cx, cy = jittered(0.5, spec.footer_y)
            elements.append(
                PageElement(p, _box_around(cx, cy, 60, 10, pw, ph), "text",
                            text=f"Page {p + 1}", font_size=9.0)
            )
            page_labels.append(FOOTER)

        pages.append(Page(index=p, width=pw, height=ph, elements=elements))
        labels.append(page_labels)

    return SourceDocument(doc_id=doc_id, pages=pages), labels


def build_synthetic_corpus(
    num_docs: int,
    seed: int = 0,
    page_range: tuple[int, int] = (10, 30),
    **overrides,
) -> list[tuple[SourceDocument, list[list[str]]]]:
    """Build a corpus of varied documents from one master seed."""
    master = random.Random(seed)
    out = []
    for i in range(num_docs):
        spec = SyntheticDocSpec(
            pages=master.randint(*page_range),
            seed=master.randrange(2**31),
            doc_id=f"doc{i:02d}",
            **overrides,
        )
        out.append(build_synthetic_document(spec))
    return out


def write_synthetic_corpus(
    corpus_dir: str | Path,
    num_docs: int,
    seed: int = 0,
    page_range: tuple[int, int] = (10, 30),
    **overrides,
) -> list[Path]:
    """Write spec files for a corpus; ingest builds the documents from them."""
    corpus_dir = Path(corpus_dir)
    corpus_dir.mkdir(parents=True, exist_ok=True)
    master = random.Random(seed)
    paths = []
    for i in range(num_docs):
        spec = SyntheticDocSpec(
            pages=master.randint(*page_range),
            seed=master.randrange(2**31),
            doc_id=f"doc{i:02d}",
            **overrides,
        )
        path = corpus_dir / f"doc{i:02d}.json"
        path.write_text(json.dumps(spec.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8")
        paths.append(path)
    return paths


class SyntheticJsonBackend:
    """Parses corpus JSON files: builder specs or serialized documents.

    A spec file carries an integer ``pages`` count; a serialized
    document carries a page list. Anything else is unreadable.
    """

    def parse(self, path: Path) -> SourceDocument:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DocumentLoadError(f"unreadable document: {path}: {exc}") from exc
        if isinstance(data, dict) and isinstance(data.get("pages"), int):
            spec = SyntheticDocSpec.from_dict(data)
            if spec.doc_id is None:
                spec = SyntheticDocSpec.from_dict({**data, "doc_id": Path(path).stem})
            doc, _ = build_synthetic_document(spec)
            return doc
        if isinstance(data, dict) and isinstance(data.get("pages"), list):
            return SourceDocument.from_dict(data)
        raise DocumentLoadError(f"unreadable document: {path}: not a recognized corpus file")
