"""Canonical prompt strings shared by inference and data generation.

The instruction below is the single source of truth: the QA pipeline
prompts with it and generated training answers are produced under it,
verbatim, so trained models see exactly what inference sends.
"""

from __future__ import annotations

import re

from .errors import PromptError

CANONICAL_INSTRUCTION = (
    "You are an assistant answering questions about a document collection. "
    "Answer using only the numbered context chunks. When the answer involves "
    "an image, cite its bracketed ID exactly as written in the context, for "
    "example [image_1.png]. When the answer involves a table, reproduce the "
    "table's bracketed data line from the context. If the context does not "
    "contain the answer, say the information is not available."
)

QA_PROMPT_TEMPLATE = (
    CANONICAL_INSTRUCTION
    + "\n\nContext:\n{context}\n\nQuestion: {question}\n\nAnswer:"
)

# Training answers come from the very same template as inference.
ANSWER_GEN_TEMPLATE = QA_PROMPT_TEMPLATE

QUESTION_GEN_TEMPLATE = (
    "Read the excerpt below and write exactly {num_questions} distinct "
    "questions it can answer. Write one question per line with no numbering."
    "\n\nContext:\n{context}\n\nQuestions:"
)

CHUNK_HEADER_FORMAT = "--- chunk {rank} ---"
EMPTY_CONTEXT = "(no context retrieved)"

_SLOT_RE = re.compile(r"\{(\w+)\}")


def validate_template(template: str, slots: tuple[str, ...] = ("context", "question")) -> None:
    """Require each named slot to appear exactly once."""
    found = _SLOT_RE.findall(template)
    for slot in slots:
        count = found.count(slot)
        if count != 1:
            raise PromptError(
                f"template must contain {{{slot}}} exactly once, found {count}"
            )


def fill_template(template: str, **values: str) -> str:
    """Substitute {name} slots without re-scanning substituted text.

    The template is split on its slots first, so braces inside the
    values (JSON table lines, for instance) are never reinterpreted.
    """
    parts = _SLOT_RE.split(template)
    out: list[str] = []
    for i, part in enumerate(parts):
        if i % 2 == 0:
            out.append(part)
        else:
            if part not in values:
                raise PromptError(f"no value supplied for template slot {{{part}}}")
            out.append(str(values[part]))
    return "".join(out)
