"""Question classification: memory kind, TMK category, and the k-score."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .errors import UnparseableLabel
from .model import TmkModel
from .prompting import VERBOSITY, render
from .providers import CompletionRequest, LanguageModel

log = logging.getLogger(__name__)

MEMORY_KINDS = ("Semantic", "Episodic")
CATEGORIES = ("KnowledgeModel", "MethodTaskModel", "MultiModel", "Irrelevant")


@dataclass(frozen=True)
class ClassifiedQuestion:
    text: str
    memory_kind: str
    category: str | None
    k_score: int
    rationale: str

    def __post_init__(self):
        if self.memory_kind not in MEMORY_KINDS:
            raise ValueError(f"unknown memory kind {self.memory_kind!r}")
        if self.category is not None and self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if self.memory_kind == "Episodic" and self.category is not None:
            raise ValueError("episodic questions carry no category")
        if self.k_score not in (1, 2, 3, 4):
            raise ValueError(f"k_score out of range: {self.k_score}")


def parse_label(completion: str, lexicon: tuple[str, ...]) -> str:
    """Match a completion against a closed label set: exact after
    lowercasing and trimming, then unique prefix in either direction."""
    normalized = completion.strip().lower().strip(".\"'!")
    for label in lexicon:
        if normalized == label.lower():
            return label
    matches = [
        label
        for label in lexicon
        if normalized.startswith(label.lower()) or label.lower().startswith(normalized)
    ]
    if len(matches) == 1 and normalized:
        return matches[0]
    raise UnparseableLabel(completion, lexicon)


def model_summary(model: TmkModel) -> str:
    counts = model.summary_counts()
    return (
        f"{model.title}: {model.description} The model defines "
        f"{counts['tasks']} task(s), {counts['methods']} method(s), and "
        f"{counts['knowledge']} knowledge entit(y/ies)."
    )


def _procedural_names(model: TmkModel) -> list[str]:
    names: list[str] = []
    for task in model.tasks:
        names.append(task.name)
    for method in model.methods:
        for state in method.states:
            names.append(state.name)
    seen = set()
    unique = []
    for name in names:
        if name not in seen:
            seen.add(name)
            unique.append(name)
    return unique


def category_descriptions(model: TmkModel) -> str:
    knowledge_names = "; ".join(e.name for e in model.knowledge)
    task_names = "; ".join(_procedural_names(model))
    return (
        "KnowledgeModel:\n"
        "Questions about the concepts, objects, and relations in the domain.\n"
        "In the context of this problem, we have the following knowledge entities:\n"
        f"Knowledge names: {knowledge_names}\n"
        "\n"
        "MethodTaskModel:\n"
        "Questions about how the tasks get done: the methods, their states, and their steps.\n"
        "In the context of this problem, we have the following tasks and steps:\n"
        f"Task names: {task_names}\n"
        "\n"
        "MultiModel:\n"
        "Questions spanning both the knowledge entities and the tasks or methods.\n"
        "\n"
        "Irrelevant:\n"
        "Questions unrelated to this problem."
    )


def classification_examples() -> str:
    return (
        "Question: What is one of the entities called? -> KnowledgeModel\n"
        "Question: What steps does the main task involve? -> MethodTaskModel\n"
        "Question: How do the entities take part in the task's steps? -> MultiModel\n"
        "Question: What is the weather today? -> Irrelevant"
    )


def _require_question(question: str) -> str:
    if not question.strip():
        raise ValueError("question must be non-empty")
    return question.strip()


def classify_memory(question: str, summary: str, provider: LanguageModel) -> str:
    question = _require_question(question)
    prompt = render("classify_memory.txt", model_summary=summary, question=question)
    completion = provider.complete(CompletionRequest(prompt=prompt, max_length_hint=8))
    return parse_label(completion, MEMORY_KINDS)


def classify_category(question: str, model: TmkModel, provider: LanguageModel) -> str:
    question = _require_question(question)
    prompt = render(
        "classify_category.txt",
        question=question,
        category_descriptions=category_descriptions(model),
        examples=classification_examples(),
    )
    completion = provider.complete(CompletionRequest(prompt=prompt, max_length_hint=8))
    return parse_label(completion, CATEGORIES)


_INT_RE = re.compile(r"-?\d+")


def compute_k_score(question: str, provider: LanguageModel) -> int:
    question = _require_question(question)
    descriptions = "\n".join(f"{level}: {text}" for level, text in VERBOSITY.items())
    prompt = render("k_score.txt", descriptions=descriptions, question=question)
    completion = provider.complete(CompletionRequest(prompt=prompt, max_length_hint=4))
    match = _INT_RE.search(completion)
    if match is None:
        raise UnparseableLabel(completion, ("1", "2", "3", "4"))
    value = int(match.group())
    if not 1 <= value <= 4:
        clamped = min(4, max(1, value))
        log.warning("k-score %d out of range, clamped to %d", value, clamped)
        return clamped
    return value
