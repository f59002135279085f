"""Metrics and batch evaluation for the QA pipeline."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .embedding import Embedder, cosine_similarity, embed
from .qa import QAResult

logger = logging.getLogger(__name__)

ACCURACY_THRESHOLDS = (0.85, 0.90, 0.95)


@dataclass
class EvalCase:
    """One evaluation question with its expectations."""

    question: str
    expected_answer: str
    expected_image_id: str | None = None
    expected_table_id: str | None = None

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("question must be non-empty")
        if not self.expected_answer.strip():
            raise ValueError("expected_answer must be non-empty")


def answer_similarity(predicted: str, gold: str, embedder: Embedder) -> float:
    """Cosine similarity between the embeddings of two answers."""
    if not predicted.strip() or not gold.strip():
        raise ValueError("answers must be non-empty")
    return cosine_similarity(embed(predicted, embedder), embed(gold, embedder))


def accuracy_at(similarities: Sequence[float], tau: float) -> float:
    """Fraction of similarities strictly exceeding the threshold."""
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must be in (0, 1)")
    sims = list(similarities)
    if not sims:
        raise ValueError("similarities must be non-empty")
    return sum(1 for s in sims if s > tau) / len(sims)


def _cites(answer: str, expected_id: str) -> bool:
    # Bracket delimiters make the match whole-token: [image_1.png]
    # never matches inside [image_11.png].
    return f"[{expected_id}]" in answer


def media_accuracy(answers: Sequence[str], expected_ids: Sequence[str]) -> float:
    """Fraction of answers citing their expected media ID.

    IDs look like ``image_3.png`` or ``table_2``; an answer counts when
    it contains the bracketed form of the ID.
    """
    if len(answers) != len(expected_ids):
        raise ValueError(
            f"answers and expected_ids must align: {len(answers)} vs {len(expected_ids)}"
        )
    if not answers:
        raise ValueError("media_accuracy needs at least one case")
    hits = sum(1 for a, e in zip(answers, expected_ids) if _cites(a, e))
    return hits / len(answers)


@dataclass
class CaseResult:
    question: str
    expected_answer: str
    answer: str
    similarity: float
    failed: bool = False
    image_hit: bool | None = None
    table_hit: bool | None = None


@dataclass
class EvalReport:
    """Aggregate metrics plus the per-case rows they came from."""

    mean_similarity: float
    accuracy: dict[str, float]
    image_accuracy: float | None
    table_accuracy: float | None
    cases: list[CaseResult] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "EvalReport":
        return cls(
            mean_similarity=data["mean_similarity"],
            accuracy=dict(data["accuracy"]),
            image_accuracy=data["image_accuracy"],
            table_accuracy=data["table_accuracy"],
            cases=[CaseResult(**row) for row in data["cases"]],
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), ensure_ascii=False, indent=2), encoding="utf-8"
        )

    @classmethod
    def load(cls, path: str | Path) -> "EvalReport":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def run_eval(
    cases: Sequence[EvalCase],
    answer_fn: Callable[[str], QAResult],
    embedder: Embedder,
) -> EvalReport:
    """Run every case through the answer pipeline and aggregate metrics.

    A per-case failure (pipeline error, empty answer) marks that case
    failed with similarity 0 and the run continues. Media hits are
    checked on the raw answer, where bracketed IDs are still intact.
    """
    if not cases:
        raise ValueError("cases must be non-empty")
    rows: list[CaseResult] = []
    for case in cases:
        raw = ""
        try:
            result = answer_fn(case.question)
            raw = result.raw_answer
            sim = answer_similarity(result.answer_text, case.expected_answer, embedder)
            failed = False
            answer_text = result.answer_text
        except Exception as exc:
            logger.warning("case failed: %s (%s)", case.question[:60], exc)
            sim = 0.0
            failed = True
            answer_text = ""
        rows.append(
            CaseResult(
                question=case.question,
                expected_answer=case.expected_answer,
                answer=answer_text,
                similarity=sim,
                failed=failed,
                image_hit=(
                    _cites(raw, case.expected_image_id)
                    if case.expected_image_id
                    else None
                ),
                table_hit=(
                    _cites(raw, case.expected_table_id)
                    if case.expected_table_id
                    else None
                ),
            )
        )

    sims = [r.similarity for r in rows]
    image_hits = [r.image_hit for r in rows if r.image_hit is not None]
    table_hits = [r.table_hit for r in rows if r.table_hit is not None]
    return EvalReport(
        mean_similarity=sum(sims) / len(sims),
        accuracy={f"{tau:.2f}": accuracy_at(sims, tau) for tau in ACCURACY_THRESHOLDS},
        image_accuracy=sum(image_hits) / len(image_hits) if image_hits else None,
        table_accuracy=sum(table_hits) / len(table_hits) if table_hits else None,
        cases=rows,
    )


def load_cases(path: str | Path) -> list[EvalCase]:
    """Read evaluation cases from JSONL."""
    cases = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        data = json.loads(line)
        known = {"question", "expected_answer", "expected_image_id", "expected_table_id"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"case line {n} has unknown keys: {sorted(unknown)}")
        cases.append(EvalCase(**data))
    return cases
