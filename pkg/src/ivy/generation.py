"""Answer generation: iterative refinement, transition walkthroughs, and the
Answer record itself."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .expressions import render_expression
from .model import Method, Task, Transition
from .prompting import VERBOSITY, load_template, render
from .providers import CompletionRequest, LanguageModel
from .retrieval import Document


@dataclass(frozen=True)
class Answer:
    text: str
    category: str
    cited_doc_ids: tuple[str, ...] = ()
    refinement_history: tuple[str, ...] = ()
    trace_id: str | None = None
    k_score: int = 1


def generate_initial(
    question: str, doc: Document, k_score: int, provider: LanguageModel
) -> str:
    """First draft from the single most relevant document."""
    prompt = render(
        "initial.txt",
        question=question,
        verbosity=VERBOSITY[k_score],
        doc_title=doc.title,
        doc_text=doc.text,
    )
    return provider.complete(CompletionRequest(prompt=prompt))


def refine(question: str, draft: str, doc: Document, provider: LanguageModel) -> str:
    """One refinement pass folding an additional document into the draft.
    May return the draft unchanged when the document adds nothing."""
    if not draft.strip():
        raise ValueError("draft must be non-empty")
    prompt = render(
        "refine.txt",
        question=question,
        draft=draft,
        doc_title=doc.title,
        doc_text=doc.text,
    )
    return provider.complete(CompletionRequest(prompt=prompt))


def extract_transitions(method: Method) -> list[Transition]:
    """Transitions in narratable order: breadth-first from the start state,
    declaration order within a state; transitions not reachable from the
    start appended afterwards in declaration order."""
    ordered: list[Transition] = []
    taken: set[str] = set()
    visited = {method.start_state}
    queue = deque([method.start_state])
    while queue:
        state_id = queue.popleft()
        for transition in method.outgoing(state_id):
            if transition.id in taken:
                continue
            ordered.append(transition)
            taken.add(transition.id)
            if transition.to_state not in visited:
                visited.add(transition.to_state)
                queue.append(transition.to_state)
    for transition in method.transitions:
        if transition.id not in taken:
            ordered.append(transition)
            taken.add(transition.id)
    return ordered


def _transition_lines(transitions: list[Transition]) -> str:
    lines = []
    for n, t in enumerate(transitions, start=1):
        actions = ", ".join(
            f"{a.slot} := {render_expression(a.expression)}" for a in t.actions
        ) or "nothing"
        lines.append(
            f"{n}. [{t.id}] {t.from_state} -> {t.to_state} "
            f"| when {render_expression(t.condition)} | do {actions} | {t.description}"
        )
    return "\n".join(lines)


def explain_transitions(
    question: str,
    transitions: list[Transition],
    task: Task,
    k_score: int,
    provider: LanguageModel,
) -> str:
    """Chain-of-thought walkthrough of the method's transitions."""
    if not transitions:
        raise ValueError("transitions must be non-empty")
    prompt = render(
        "cot_transitions.txt",
        examples=load_template("cot_examples.txt").strip(),
        task_name=task.name,
        task_description=task.description,
        verbosity=VERBOSITY[k_score],
        transitions=_transition_lines(transitions),
        question=question,
    )
    return provider.complete(CompletionRequest(prompt=prompt, max_length_hint=2048))
