"""Automated answer scoring: completeness, precision and consistency.

The scorers are deterministic token-overlap proxies for a human Likert
rubric, and the reference for each question is the set of documents the
answer itself cited.  Both caveats are declared in the report metadata:
the proxy substitutes for human judgment, and scoring against retrieved
documents biases precision upward.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import EmptyReference, IvyError
from .generation import Answer
from .pipeline import ModelSession, answer, answer_to_dict
from .providers import Embedder, LanguageModel
from .retrieval import Document
from .textutils import content_tokens

REPORT_METADATA = {
    "scoring": "token-overlap proxy, not human Likert judgment",
    "reference": "the documents cited by each answer; this biases precision upward",
    "band_convention": "boundaries lower-inclusive: [0,.2) [.2,.4) [.4,.6) [.6,.8) [.8,1]",
    "consistency_bands": "all=5, >=80%=4, >=60%=3, >=40%=2, else 1 (interpolated ordinal scale)",
}


@dataclass(frozen=True)
class MetricReport:
    """Per-question scores: fractions in [0, 1] and Likert bands in 1..5."""

    completeness_fraction: float
    completeness_band: int
    precision_fraction: float
    precision_band: int
    consistency_runs: int
    consistency_matches: int
    consistency_band: int

    def __post_init__(self) -> None:
        for band in (self.completeness_band, self.precision_band, self.consistency_band):
            if not 1 <= band <= 5:
                raise ValueError(f"band {band} outside 1..5")
        if self.consistency_matches > self.consistency_runs:
            raise ValueError("matches exceed runs")

    def to_dict(self) -> dict:
        return {
            "completeness_fraction": self.completeness_fraction,
            "completeness_band": self.completeness_band,
            "precision_fraction": self.precision_fraction,
            "precision_band": self.precision_band,
            "consistency_runs": self.consistency_runs,
            "consistency_matches": self.consistency_matches,
            "consistency_band": self.consistency_band,
        }


@dataclass(frozen=True)
class QuestionResult:
    question: str
    answer: Answer
    metrics: MetricReport


def band_for_fraction(fraction: float) -> int:
    """Map a fraction to its Likert band; boundaries are lower-inclusive."""
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction {fraction} outside [0, 1]")
    if fraction < 0.20:
        return 1
    if fraction < 0.40:
        return 2
    if fraction < 0.60:
        return 3
    if fraction < 0.80:
        return 4
    return 5


def _doc_text(doc: Document) -> str:
    # Same title+text string the retrieval index embeds.
    return f"{doc.title}\n{doc.text}"


def completeness(answer_text: str, reference_doc: Document) -> tuple[float, int]:
    """Recall of the reference document's content tokens in the answer."""
    reference = content_tokens(_doc_text(reference_doc))
    if not reference:
        raise EmptyReference(f"document {reference_doc.doc_id!r} has no content tokens")
    fraction = len(reference & content_tokens(answer_text)) / len(reference)
    return fraction, band_for_fraction(fraction)


def precision(answer_text: str, reference_docs: list[Document]) -> tuple[float, int]:
    """Proportion of answer content tokens found in the union of references."""
    union: set[str] = set()
    for doc in reference_docs:
        union |= content_tokens(_doc_text(doc))
    if not union:
        raise EmptyReference("reference documents have no content tokens")
    answer_tokens = content_tokens(answer_text)
    fraction = len(answer_tokens & union) / len(answer_tokens) if answer_tokens else 0.0
    return fraction, band_for_fraction(fraction)


def consistency_band(matches: int, runs: int) -> int:
    """Ordinal uniformity band from the modal-match count."""
    if matches == runs:
        return 5
    ratio = matches / runs
    if ratio >= 0.80:
        return 4
    if ratio >= 0.60:
        return 3
    if ratio >= 0.40:
        return 2
    return 1


def consistency(
    question: str,
    session: ModelSession,
    runs: int,
    language_model: LanguageModel,
    embedder: Embedder,
) -> tuple[int, int]:
    """Run the full pipeline `runs` times; count runs matching the modal
    answer text.  Runs that raise count as non-matching."""
    if runs < 2:
        raise ValueError(f"consistency requires runs >= 2, got {runs}")
    texts: list[str] = []
    for _ in range(runs):
        try:
            texts.append(answer(question, session, language_model, embedder).text)
        except IvyError:
            pass
    matches = max(Counter(texts).values()) if texts else 0
    return matches, consistency_band(matches, runs)


def evaluate_question(
    question: str,
    session: ModelSession,
    language_model: LanguageModel,
    embedder: Embedder,
    runs: int = 5,
) -> QuestionResult:
    """Score one question: a single canonical run for completeness and
    precision, then `runs` repeat runs for consistency."""
    result = answer(question, session, language_model, embedder)
    by_id = {d.doc_id: d for d in session.documents}
    cited = [by_id[i] for i in result.cited_doc_ids]
    if not cited:
        raise EmptyReference(f"answer to {question!r} cites no documents to score against")
    comp_fraction, comp_band = completeness(result.text, cited[0])
    prec_fraction, prec_band = precision(result.text, cited)
    matches, cons_band = consistency(question, session, runs, language_model, embedder)
    return QuestionResult(
        question=question,
        answer=result,
        metrics=MetricReport(
            completeness_fraction=comp_fraction,
            completeness_band=comp_band,
            precision_fraction=prec_fraction,
            precision_band=prec_band,
            consistency_runs=runs,
            consistency_matches=matches,
            consistency_band=cons_band,
        ),
    )


def load_questions(text: str) -> list[str]:
    """Question corpus format: one question per line; blank lines and
    lines starting with '#' are skipped."""
    questions = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            questions.append(line)
    return questions


def evaluate_corpus(
    questions: list[str],
    session: ModelSession,
    language_model: LanguageModel,
    embedder: Embedder,
    runs: int = 5,
) -> list[QuestionResult]:
    return [
        evaluate_question(q, session, language_model, embedder, runs=runs)
        for q in questions
    ]


# Report output ---------------------------------------------------------------

_CSV_COLUMNS = [
    "question",
    "category",
    "k_score",
    "completeness_fraction",
    "completeness_band",
    "precision_fraction",
    "precision_band",
    "consistency_runs",
    "consistency_matches",
    "consistency_band",
]


def report_to_dict(results: list[QuestionResult], model_id: str, runs: int) -> dict:
    return {
        "model_id": model_id,
        "runs": runs,
        "metadata": dict(REPORT_METADATA),
        "results": [
            {
                "question": r.question,
                "answer": answer_to_dict(r.answer),
                "metrics": r.metrics.to_dict(),
            }
            for r in results
        ],
    }


def report_rows(results: list[QuestionResult]) -> list[dict]:
    rows = []
    for r in results:
        m = r.metrics
        rows.append({
            "question": r.question,
            "category": r.answer.category,
            "k_score": r.answer.k_score,
            "completeness_fraction": f"{m.completeness_fraction:.4f}",
            "completeness_band": m.completeness_band,
            "precision_fraction": f"{m.precision_fraction:.4f}",
            "precision_band": m.precision_band,
            "consistency_runs": m.consistency_runs,
            "consistency_matches": m.consistency_matches,
            "consistency_band": m.consistency_band,
        })
    return rows


def render_report_table(results: list[QuestionResult]) -> str:
    """Fixed-width table for terminal output."""
    headers = ["question", "category", "k", "comp", "band", "prec", "band", "cons", "band"]
    body = []
    for r in results:
        m = r.metrics
        body.append([
            r.question if len(r.question) <= 44 else r.question[:41] + "...",
            r.answer.category,
            str(r.answer.k_score),
            f"{m.completeness_fraction:.2f}",
            str(m.completeness_band),
            f"{m.precision_fraction:.2f}",
            str(m.precision_band),
            f"{m.consistency_matches}/{m.consistency_runs}",
            str(m.consistency_band),
        ])
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(headers)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for row in body:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))
    return "\n".join(lines)


def _write_figures(results: list[QuestionResult], out_dir: Path) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    labels = [f"q{i + 1}" for i in range(len(results))]
    positions = np.arange(len(results))
    written = []

    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(results)), 4.0))
    width = 0.27
    for offset, (name, values) in enumerate([
        ("completeness", [r.metrics.completeness_band for r in results]),
        ("precision", [r.metrics.precision_band for r in results]),
        ("consistency", [r.metrics.consistency_band for r in results]),
    ]):
        ax.bar(positions + (offset - 1) * width, values, width, label=name)
    ax.set_xticks(positions, labels)
    ax.set_ylim(0, 5.5)
    ax.set_ylabel("band (1-5)")
    ax.set_title("Likert bands per question")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = out_dir / "bands.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(results)), 4.0))
    for offset, (name, values) in enumerate([
        ("completeness", [r.metrics.completeness_fraction for r in results]),
        ("precision", [r.metrics.precision_fraction for r in results]),
    ]):
        ax.bar(positions + (offset - 0.5) * 0.35, values, 0.35, label=name)
    ax.set_xticks(positions, labels)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("fraction")
    ax.set_title("Token-overlap fractions per question")
    ax.legend(loc="lower right")
    fig.tight_layout()
    path = out_dir / "fractions.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def write_report(
    results: list[QuestionResult],
    model_id: str,
    out_dir: Path,
    runs: int,
) -> dict[str, list[Path]]:
    """Write report.json, report.csv and the band/fraction figures into
    `out_dir`; returns the written paths grouped by kind."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    json_path = out_dir / "report.json"
    json_path.write_text(
        json.dumps(report_to_dict(results, model_id, runs), indent=2) + "\n"
    )

    csv_path = out_dir / "report.csv"
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=_CSV_COLUMNS)
    writer.writeheader()
    for row in report_rows(results):
        writer.writerow(row)
    csv_path.write_text(buffer.getvalue())

    figures = _write_figures(results, out_dir)
    return {"json": [json_path], "csv": [csv_path], "figures": figures}
