"""Analogical-reasoning evaluation: vector offset answering under cosine.

A question "a : b :: c : ?" is answered by the vocabulary word whose
length-normalized input embedding has the highest cosine similarity to
u_b - u_a + u_c, with a, b and c excluded from the candidates. Questions
with any out-of-vocabulary word are skipped but still counted in the
accuracy denominators, matching how results are conventionally reported
for this task.

The standard question file format: lines starting with ":" open a category,
every other non-blank line holds four whitespace-separated words. Category
names beginning with "gram" are syntactic, the rest semantic. Matching is
case-insensitive (questions are lowercased on load, like the corpora).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

SYNTACTIC_PREFIX = "gram"


@dataclass(frozen=True)
class AnalogyQuestion:
    a: str
    b: str
    c: str
    expected: str
    category: str


@dataclass
class CategoryScore:
    correct: int = 0
    total: int = 0

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


@dataclass
class EvalReport:
    categories: dict[str, CategoryScore] = field(default_factory=dict)
    semantic: CategoryScore = field(default_factory=CategoryScore)
    syntactic: CategoryScore = field(default_factory=CategoryScore)
    total: CategoryScore = field(default_factory=CategoryScore)
    skipped: int = 0  # OOV questions (still in the totals)


def is_syntactic(category: str) -> bool:
    return category.startswith(SYNTACTIC_PREFIX)


def load_questions(path) -> list[AnalogyQuestion]:
    """Parse a question file; raises ValueError with the line number on bad lines."""
    questions: list[AnalogyQuestion] = []
    category: Optional[str] = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith(":"):
                category = line[1:].strip()
                continue
            parts = line.lower().split()
            if len(parts) != 4:
                raise ValueError(f"{path}: line {lineno}: expected 4 words, got {len(parts)}")
            if category is None:
                raise ValueError(f"{path}: line {lineno}: question before any ':' category header")
            questions.append(AnalogyQuestion(*parts, category=category))
    return questions


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Copy of the matrix with unit-length rows (zero rows left untouched)."""
    vectors = np.asarray(vectors, dtype=np.float32)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return vectors / norms


def answer(
    vectors: np.ndarray, index: dict[str, int], question: AnalogyQuestion
) -> Optional[int]:
    """Predicted word index for one question, or None when any word is OOV.

    Convenience path that normalizes per call; use :func:`evaluate` for
    whole question sets.
    """
    try:
        ia, ib, ic = index[question.a], index[question.b], index[question.c]
    except KeyError:
        return None
    if question.expected not in index:
        return None
    normed = normalize_rows(vectors)
    query = normed[ib] - normed[ia] + normed[ic]
    scores = normed @ query
    scores[[ia, ib, ic]] = -np.inf
    return int(np.argmax(scores))  # ties resolve to the lowest index


def evaluate(
    vectors: np.ndarray,
    index: dict[str, int],
    questions: Sequence[AnalogyQuestion],
    batch_size: int = 512,
) -> EvalReport:
    """Score a question set; accuracies count OOV skips in the denominator."""
    report = EvalReport()
    for q in questions:
        report.categories.setdefault(q.category, CategoryScore())

    n = len(questions)
    quads = np.full((n, 4), -1, dtype=np.int64)
    for qi, q in enumerate(questions):
        if all(w in index for w in (q.a, q.b, q.c, q.expected)):
            quads[qi] = [index[q.a], index[q.b], index[q.c], index[q.expected]]
    resolvable = quads[:, 0] >= 0
    report.skipped = int(n - resolvable.sum())

    normed = normalize_rows(vectors)
    correct = np.zeros(n, dtype=bool)
    live = np.flatnonzero(resolvable)
    for lo in range(0, len(live), batch_size):
        rows = live[lo : lo + batch_size]
        qa, qb, qc, qd = quads[rows].T
        queries = normed[qb] - normed[qa] + normed[qc]
        scores = queries @ normed.T
        arange = np.arange(len(rows))
        scores[arange, qa] = -np.inf
        scores[arange, qb] = -np.inf
        scores[arange, qc] = -np.inf
        correct[rows] = scores.argmax(axis=1) == qd

    for qi, q in enumerate(questions):
        cat = report.categories[q.category]
        cat.total += 1
        rollup = report.syntactic if is_syntactic(q.category) else report.semantic
        rollup.total += 1
        report.total.total += 1
        if correct[qi]:
            cat.correct += 1
            rollup.correct += 1
            report.total.correct += 1
    return report


def format_table(report: EvalReport) -> str:
    """Plain-text report: one row per category, then the rollups."""
    width = max([len(c) for c in report.categories] + [len("Syntactic")]) + 2
    lines = []
    for name, score in report.categories.items():
        lines.append(f"{name:<{width}} {score.accuracy:7.2%}  ({score.correct}/{score.total})")
    lines.append("-" * (width + 24))
    for name, score in (
        ("Semantic", report.semantic),
        ("Syntactic", report.syntactic),
        ("Total", report.total),
    ):
        lines.append(f"{name:<{width}} {score.accuracy:7.2%}  ({score.correct}/{score.total})")
    lines.append(f"skipped (out-of-vocabulary): {report.skipped}")
    return "\n".join(lines)


def format_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["category", "accuracy", "correct", "total"])
    for name, score in report.categories.items():
        writer.writerow([name, f"{score.accuracy:.6f}", score.correct, score.total])
    for name, score in (
        ("semantic", report.semantic),
        ("syntactic", report.syntactic),
        ("total", report.total),
    ):
        writer.writerow([name, f"{score.accuracy:.6f}", score.correct, score.total])
    writer.writerow(["skipped", "", report.skipped, ""])
    return buf.getvalue()


def format_json(report: EvalReport) -> str:
    def entry(score: CategoryScore):
        return {"correct": score.correct, "total": score.total, "accuracy": score.accuracy}

    return json.dumps(
        {
            "categories": {name: entry(s) for name, s in report.categories.items()},
            "semantic": entry(report.semantic),
            "syntactic": entry(report.syntactic),
            "total": entry(report.total),
            "skipped": report.skipped,
        },
        indent=2,
    )
