"""LLM client interface and deterministic offline stand-ins.

The mocks parse the prompt shapes produced by this package (chunk
headers, Context/Question sections) and answer from them, so the whole
pipeline runs offline with stable outputs.
"""

from __future__ import annotations

import re
from typing import Protocol

from .media import DICT_TABLE_LINE_RE
from .raptor import first_sentence


class LlmClient(Protocol):
    """Anything that can complete a prompt."""

    def complete(self, prompt: str, max_tokens: int = 512) -> str: ...


_CHUNK1_RE = re.compile(r"^--- chunk 1 ---\n", re.M)
_NEXT_SECTION_RE = re.compile(r"^--- chunk \d+ ---$", re.M)

_CAPTION_ID_RE = re.compile(r"\[image_\d+\.png\]")
_IMAGE_LINE_ID_RE = re.compile(r"!\[(image_\d+)\]\(image_\d+\.png\)")


def _rank1_chunk(prompt: str) -> str | None:
    m = _CHUNK1_RE.search(prompt)
    if not m:
        return None
    start = m.end()
    nxt = _NEXT_SECTION_RE.search(prompt, start)
    end = nxt.start() if nxt else prompt.find("\n\nQuestion:", start)
    if end == -1:
        end = len(prompt)
    return prompt[start:end]


def _context_block(prompt: str) -> str | None:
    marker = "Context:\n"
    start = prompt.find(marker)
    if start == -1:
        return None
    start += len(marker)
    for stop in ("\n\nQuestion:", "\n\nQuestions:"):
        end = prompt.find(stop, start)
        if end != -1:
            return prompt[start:end]
    return prompt[start:]


class EchoTopChunkLlm:
    """Returns the rank-1 context chunk verbatim."""

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        chunk = _rank1_chunk(prompt)
        if chunk is None:
            return "No context was retrieved for this question."
        return chunk.strip("\n")


class CitingLlm:
    """Cites every media reference found in the rank-1 chunk.

    Image references become bracketed IDs; table records are repeated
    as their full single-line form so they can be expanded downstream.
    """

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        chunk = _rank1_chunk(prompt)
        if chunk is None:
            return "No context was retrieved for this question."
        citations: list[str] = []
        seen: set[str] = set()
        for line in chunk.split("\n"):
            t = DICT_TABLE_LINE_RE.match(line)
            if t and line not in seen:
                citations.append(line)
                seen.add(line)
                continue
            for m in _IMAGE_LINE_ID_RE.finditer(line):
                ref = f"[{m.group(1)}.png]"
                if ref not in seen:
                    citations.append(ref)
                    seen.add(ref)
            for m in _CAPTION_ID_RE.finditer(line):
                if m.group(0) not in seen:
                    citations.append(m.group(0))
                    seen.add(m.group(0))
        if not citations:
            return "The most relevant context cites no figures or tables."
        return "Based on the retrieved context:\n" + "\n".join(citations)


class QuestionGenLlm:
    """Derives the requested number of questions from the context block."""

    _COUNT_RE = re.compile(r"write exactly (\d+)")

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        m = self._COUNT_RE.search(prompt)
        n = int(m.group(1)) if m else 3
        context = _context_block(prompt) or prompt
        words = [w for w in context.split() if len(w) >= 4]
        if not words:
            words = ["this excerpt"]
        questions = []
        for i in range(n):
            w = words[(i * max(1, len(words) // max(n, 1))) % len(words)]
            questions.append(f"What does the excerpt say about {w}?")
        return "\n".join(questions)


class FirstSentenceAnswerLlm:
    """Answers with the first sentence of the context block."""

    def complete(self, prompt: str, max_tokens: int = 512) -> str:
        context = _context_block(prompt)
        if context is None:
            return "The information is not available."
        sentence = first_sentence(context)
        return sentence if sentence else "The information is not available."
