"""Training-data generation from enriched documents.

Long documents are cut into generation contexts; each context yields
questions and answers, and every pair is packed into a ten-chunk
example: five slices of the real context mixed with five distractor
chunks drawn from other documents.
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import asdict, dataclass
from pathlib import Path

from .chunking import chunk_document
from .errors import DatagenError, ServiceError
from .llm import LlmClient
from .prompts import (
    ANSWER_GEN_TEMPLATE,
    CANONICAL_INSTRUCTION,
    QUESTION_GEN_TEMPLATE,
    fill_template,
)

logger = logging.getLogger(__name__)

SOURCE, DISTRACTOR = "source", "distractor"

DEFAULT_CONTEXT_CHARS = 5000
DEFAULT_SLICE_CHARS = 1000
CHUNKS_PER_EXAMPLE = 10
SOURCE_CHUNKS_PER_EXAMPLE = 5


@dataclass
class TrainingExample:
    """One supervised QA example with mixed real and distractor context."""

    instruction: str
    context_chunks: list[str]
    question: str
    answer: str
    source_doc_id: str
    provenance: list[str]

    def __post_init__(self) -> None:
        if len(self.context_chunks) != CHUNKS_PER_EXAMPLE:
            raise ValueError(
                f"expected {CHUNKS_PER_EXAMPLE} context chunks, got {len(self.context_chunks)}"
            )
        if len(self.provenance) != len(self.context_chunks):
            raise ValueError("provenance must align with context_chunks")
        for i, chunk in enumerate(self.context_chunks):
            if not chunk:
                raise ValueError(f"context chunk {i} is empty")
            if len(chunk) > DEFAULT_SLICE_CHARS:
                raise ValueError(
                    f"context chunk {i} has {len(chunk)} chars, max {DEFAULT_SLICE_CHARS}"
                )
        counts = {SOURCE: 0, DISTRACTOR: 0}
        for p in self.provenance:
            if p not in counts:
                raise ValueError(f"invalid provenance flag: {p!r}")
            counts[p] += 1
        if counts[SOURCE] != SOURCE_CHUNKS_PER_EXAMPLE:
            raise ValueError(
                f"expected {SOURCE_CHUNKS_PER_EXAMPLE} source chunks, got {counts[SOURCE]}"
            )
        if not self.question.strip() or not self.answer.strip():
            raise ValueError("question and answer must be non-empty")
        if not self.instruction:
            raise ValueError("instruction must be non-empty")


def split_training_contexts(text: str, size: int = DEFAULT_CONTEXT_CHARS) -> list[str]:
    """Cut text into consecutive ``size``-char generation contexts.

    A final remainder shorter than half of ``size`` is folded into the
    previous context instead of standing alone.
    """
    if size < 2:
        raise ValueError("size must be >= 2")
    if not text:
        return []
    pieces = [text[i : i + size] for i in range(0, len(text), size)]
    if len(pieces) >= 2 and len(pieces[-1]) < size / 2:
        tail = pieces.pop()
        pieces[-1] += tail
    return pieces


def generate_questions(
    context: str, qgen: LlmClient, num_questions: int = 3
) -> list[str]:
    """Ask the question generator for one question per line.

    A generator failure skips this context with a warning rather than
    aborting the run.
    """
    if not context.strip():
        raise ValueError("context must be non-empty")
    if num_questions < 1:
        raise ValueError("num_questions must be >= 1")
    prompt = fill_template(
        QUESTION_GEN_TEMPLATE, num_questions=str(num_questions), context=context
    )
    try:
        response = qgen.complete(prompt)
    except ServiceError as exc:
        logger.warning("question generation failed, skipping context: %s", exc)
        return []
    return [line.strip() for line in response.splitlines() if line.strip()]


def generate_answer(question: str, context: str, agen: LlmClient) -> str | None:
    """Produce the gold answer for one question under the canonical prompt.

    Returns None (skip the pair) when the generator fails or answers
    with empty text.
    """
    prompt = fill_template(ANSWER_GEN_TEMPLATE, context=context, question=question)
    try:
        answer = agen.complete(prompt).strip()
    except ServiceError as exc:
        logger.warning("answer generation failed, skipping pair: %s", exc)
        return None
    if not answer:
        logger.warning("empty generated answer, skipping pair")
        return None
    return answer


def _source_slices(context: str) -> list[str]:
    if len(context) < SOURCE_CHUNKS_PER_EXAMPLE:
        raise DatagenError(
            f"context too short to slice: {len(context)} chars, "
            f"need at least {SOURCE_CHUNKS_PER_EXAMPLE}"
        )
    # Nominal contexts slice into five 1000-char pieces; shorter ones
    # into five equal pieces, so the whole context is always covered.
    piece = min(DEFAULT_SLICE_CHARS, math.ceil(len(context) / SOURCE_CHUNKS_PER_EXAMPLE))
    return [
        context[i * piece : (i + 1) * piece] for i in range(SOURCE_CHUNKS_PER_EXAMPLE)
    ]


def assemble_example(
    context: str,
    question: str,
    answer: str,
    source_doc_id: str,
    distractor_pool: list[tuple[str, str]],
    seed: int | str = 0,
) -> TrainingExample:
    """Mix five context slices with five seeded distractors and shuffle.

    ``distractor_pool`` holds (doc_id, chunk_text) pairs; only chunks
    from other documents are eligible, and fewer than five eligible
    chunks is an error.
    """
    slices = _source_slices(context)
    eligible = [
        (d, t)
        for d, t in distractor_pool
        if d != source_doc_id and t and len(t) <= DEFAULT_SLICE_CHARS
    ]
    if len(eligible) < SOURCE_CHUNKS_PER_EXAMPLE:
        raise DatagenError(
            f"distractor pool too small: need at least {SOURCE_CHUNKS_PER_EXAMPLE} "
            f"chunks from documents other than {source_doc_id!r}, have {len(eligible)}"
        )
    rng = random.Random(seed)
    distractors = rng.sample(eligible, SOURCE_CHUNKS_PER_EXAMPLE)
    tagged = [(s, SOURCE) for s in slices] + [(t, DISTRACTOR) for _, t in distractors]
    rng.shuffle(tagged)
    return TrainingExample(
        instruction=CANONICAL_INSTRUCTION,
        context_chunks=[t for t, _ in tagged],
        question=question.strip(),
        answer=answer.strip(),
        source_doc_id=source_doc_id,
        provenance=[p for _, p in tagged],
    )


def generate_dataset(
    docs: list[tuple[str, str]],
    qgen: LlmClient,
    agen: LlmClient,
    seed: int = 0,
    questions_per_context: int = 3,
    context_size: int = DEFAULT_CONTEXT_CHARS,
    distractor_pool: list[tuple[str, str]] | None = None,
) -> list[TrainingExample]:
    """Generate examples for every (doc_id, enriched_text) document.

    The distractor pool defaults to 1000-char chunks of every document;
    per-example randomness is derived from the master seed plus the
    example's coordinates, so runs are reproducible end to end.
    """
    if distractor_pool is None:
        distractor_pool = []
        for doc_id, text in sorted(docs):
            for chunk in chunk_document(doc_id, text, DEFAULT_SLICE_CHARS):
                if len(chunk.text) <= DEFAULT_SLICE_CHARS:
                    distractor_pool.append((doc_id, chunk.text))

    examples: list[TrainingExample] = []
    for doc_id, text in sorted(docs):
        contexts = split_training_contexts(text, size=context_size)
        for ci, context in enumerate(contexts):
            questions = generate_questions(context, qgen, questions_per_context)
            for qi, question in enumerate(questions):
                answer = generate_answer(question, context, agen)
                if answer is None:
                    continue
                examples.append(
                    assemble_example(
                        context,
                        question,
                        answer,
                        source_doc_id=doc_id,
                        distractor_pool=distractor_pool,
                        seed=f"{seed}:{doc_id}:{ci}:{qi}",
                    )
                )
    return examples


def export_dataset(examples: list[TrainingExample], path: str | Path) -> None:
    """Write examples as JSONL with a stable field order."""
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(asdict(ex), ensure_ascii=False) + "\n")


def load_dataset(path: str | Path) -> list[TrainingExample]:
    """Read a JSONL dataset back; inverse of export_dataset."""
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(TrainingExample(**json.loads(line)))
    return out
