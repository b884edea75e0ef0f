"""End-to-end question answering over one TMK model."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Optional

from .classify import classify_category, classify_memory, compute_k_score, model_summary
from .errors import (
    EmptyCorpus,
    IvyError,
    MissingInitialState,
    PipelineStageError,
)
from .generation import (
    Answer,
    explain_transitions,
    extract_transitions,
    generate_initial,
    refine,
)
from .model import TmkModel
from .prompting import render
from .providers import Embedder, LanguageModel
from .retrieval import (
    TASK,
    Document,
    Index,
    build_index,
    compile_documents,
    select_for_category,
    top_k,
)
from .simulate import render_trace_summary, simulate, summarize_trace


@dataclass(frozen=True)
class ModelSession:
    """A loaded model with its compiled document corpus and search index."""

    model: TmkModel
    documents: tuple[Document, ...]
    index: Index

    @classmethod
    def build(cls, model: TmkModel, embedder: Embedder) -> "ModelSession":
        documents = tuple(compile_documents(model))
        return cls(model=model, documents=documents, index=build_index(list(documents), embedder))


@contextlib.contextmanager
def _stage(name: str):
    try:
        yield
    except IvyError as exc:
        raise PipelineStageError(name, exc) from exc


def answer(
    question: str,
    session: ModelSession,
    language_model: LanguageModel,
    embedder: Embedder,
    trace_store=None,
) -> Answer:
    """Full pipeline: memory-kind classification, then either simulation
    (episodic) or category classification, retrieval and generation
    (semantic)."""
    model = session.model

    with _stage("classify-memory"):
        memory_kind = classify_memory(question, model_summary(model), language_model)

    if memory_kind == "Episodic":
        return _episodic(question, session, language_model, embedder, trace_store)

    with _stage("classify-category"):
        category = classify_category(question, model, language_model)

    if category == "Irrelevant":
        text = render("irrelevant.txt", model_title=model.title).strip()
        return Answer(text=text, category=category, k_score=1)

    with _stage("k-score"):
        k_score = compute_k_score(question, language_model)

    if category == "MethodTaskModel":
        return _method_task(question, session, k_score, language_model, embedder)
    return _knowledge(question, session, category, k_score, language_model, embedder)


def _knowledge(
    question: str,
    session: ModelSession,
    category: str,
    k_score: int,
    language_model: LanguageModel,
    embedder: Embedder,
) -> Answer:
    """Iterative refinement over the top k documents."""
    with _stage("retrieval"):
        retrieved = select_for_category(session.index, question, category, k_score, embedder)
        if not retrieved.documents:
            raise EmptyCorpus(f"no documents available for category {category}")

    with _stage("generation"):
        draft = generate_initial(
            question, retrieved.documents[0].document, k_score, language_model
        )
        history = [draft]
        for scored in retrieved.documents[1:]:
            draft = refine(question, draft, scored.document, language_model)
            history.append(draft)

    return Answer(
        text=draft,
        category=category,
        cited_doc_ids=retrieved.doc_ids,
        refinement_history=tuple(history),
        k_score=k_score,
    )


def _method_task(
    question: str,
    session: ModelSession,
    k_score: int,
    language_model: LanguageModel,
    embedder: Embedder,
) -> Answer:
    """Chain-of-thought walkthrough of the best task's method."""
    with _stage("retrieval"):
        retrieved = select_for_category(
            session.index, question, "MethodTaskModel", k_score, embedder
        )
        if not retrieved.documents:
            raise EmptyCorpus("no task documents available")

    task_doc, method_doc = retrieved.documents
    task = session.model.task(task_doc.document.source_ref)
    method = next(
        m for m in session.model.methods if m.id == method_doc.document.source_ref
    )
    transitions = extract_transitions(method)
    with _stage("generation"):
        if transitions:
            text = explain_transitions(question, transitions, task, k_score, language_model)
        else:
            text = method.description
    return Answer(
        text=text,
        category="MethodTaskModel",
        cited_doc_ids=retrieved.doc_ids,
        refinement_history=(text,),
        k_score=k_score,
    )


def _episodic(
    question: str,
    session: ModelSession,
    language_model: LanguageModel,
    embedder: Embedder,
    trace_store,
) -> Answer:
    """Simulate the best-matching task from the model's declared initial
    state and narrate the trace."""
    with _stage("retrieval"):
        best = top_k(session.index, question, 1, embedder, categories={TASK})
        if not best:
            raise EmptyCorpus("no task documents available")
    task_doc = best[0].document

    model = session.model
    if model.default_initial is None:
        raise PipelineStageError(
            "simulation",
            MissingInitialState(
                f"model {model.id!r} declares no default_initial world state"
            ),
        )
    with _stage("simulation"):
        trace = simulate(
            model, task_doc.source_ref, model.default_initial, store=trace_store
        )
    text = render_trace_summary(summarize_trace(trace))
    return Answer(
        text=text,
        category="Episodic",
        cited_doc_ids=(task_doc.doc_id,),
        trace_id=trace.trace_id,
        k_score=1,
    )


def answer_to_dict(result: Answer) -> dict:
    return {
        "text": result.text,
        "category": result.category,
        "k_score": result.k_score,
        "cited_doc_ids": list(result.cited_doc_ids),
        "refinement_history": list(result.refinement_history),
        "trace_id": result.trace_id,
    }
