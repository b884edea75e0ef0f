"""Document compilation, indexing, and category-filtered top-k retrieval."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import EmptyCorpus, MissingAssociatedMethod
from .expressions import render_expression
from .model import KnowledgeEntity, Method, ParameterSpec, Task, TmkModel
from .prompting import render
from .providers import Embedder
from .textutils import singularize

KNOWLEDGE = "Knowledge"
TASK = "Task"
METHOD = "Method"
DOC_CATEGORIES = (KNOWLEDGE, TASK, METHOD)


@dataclass(frozen=True)
class Document:
    doc_id: str
    category: str
    title: str
    text: str
    source_ref: str
    associated_method_ref: str | None = None


@dataclass(frozen=True)
class ScoredDocument:
    document: Document
    score: float


@dataclass(frozen=True)
class Index:
    dimension: int
    entries: tuple[tuple[str, np.ndarray, str], ...]
    documents: Mapping[str, Document]


@dataclass(frozen=True)
class RetrievalSet:
    category: str
    documents: tuple[ScoredDocument, ...]

    @property
    def doc_ids(self) -> tuple[str, ...]:
        return tuple(s.document.doc_id for s in self.documents)


def _doc_id(model: TmkModel, category: str, source_ref: str) -> str:
    return f"{model.id}/{category}/{source_ref}"


def _singular_phrase(name: str) -> str:
    words = name.split()
    if not words:
        return name
    return " ".join(words[:-1] + [singularize(words[-1])])


def knowledge_title(entity: KnowledgeEntity) -> str:
    # Relation entities keep their plain name; concepts and objects read as
    # dictionary headwords.
    if entity.kind == "relation":
        return entity.name
    return f"{_singular_phrase(entity.name)} Definition"


def _render_knowledge(model: TmkModel, entity: KnowledgeEntity) -> str:
    properties_clause = ""
    if entity.properties:
        listed = ", ".join(f"{name} ({kind})" for name, kind in entity.properties.items())
        properties_clause = f" Its recorded properties are {listed}."
    relations_clause = ""
    if entity.relations:
        def target_name(target: str) -> str:
            try:
                return model.entity(target).name
            except KeyError:
                return target
        listed = "; ".join(f"{rel} {target_name(target)}" for rel, target in entity.relations)
        relations_clause = f" It relates to: {listed}."
    return render(
        "doc_templates/knowledge.txt",
        description=entity.description,
        name=entity.name,
        kind=entity.kind,
        properties_clause=properties_clause,
        relations_clause=relations_clause,
    ).strip()


def _render_parameters(params: Iterable[ParameterSpec]) -> str:
    rendered = []
    for p in params:
        if p.value_kind == "enum":
            detail = "enum of " + "/".join(p.enum_values or ())
        else:
            detail = p.value_kind
        if p.constraint is not None:
            detail += f", constrained by {render_expression(p.constraint)}"
        rendered.append(f"{p.name} ({detail})")
    return "; ".join(rendered) if rendered else "nothing"


def _render_task(task: Task) -> str:
    return render(
        "doc_templates/task.txt",
        description=task.description,
        name=task.name,
        givens=_render_parameters(task.givens),
        makes=_render_parameters(task.makes),
    ).strip()


def _render_method(model: TmkModel, method: Method) -> str:
    task = model.task(method.task_ref)
    states = "; ".join(f"{s.name} ({s.description})" for s in method.states)
    steps = []
    for t in method.transitions:
        actions = ", ".join(
            f"{a.slot} := {render_expression(a.expression)}" for a in t.actions
        ) or "no changes"
        steps.append(
            f"{method.state(t.from_state).name} -> {method.state(t.to_state).name} "
            f"when {render_expression(t.condition)}, doing {actions}: {t.description}"
        )
    end_names = ", ".join(
        method.state(s).name for s in sorted(method.end_states)
    )
    return render(
        "doc_templates/method.txt",
        description=method.description,
        task_name=task.name,
        start_state=method.state(method.start_state).name,
        end_states=end_names,
        states=states,
        transitions=" ".join(steps),
    ).strip()


def method_title(model: TmkModel, method: Method) -> str:
    return f"{model.task(method.task_ref).name} Method"


def compile_documents(model: TmkModel) -> list[Document]:
    """One document per knowledge entity, task, and method; Task documents
    point at their first method's document."""
    docs: list[Document] = []
    for entity in model.knowledge:
        docs.append(
            Document(
                doc_id=_doc_id(model, KNOWLEDGE, entity.id),
                category=KNOWLEDGE,
                title=knowledge_title(entity),
                text=_render_knowledge(model, entity),
                source_ref=entity.id,
            )
        )
    method_doc_ids = {m.id: _doc_id(model, METHOD, m.id) for m in model.methods}
    for task in model.tasks:
        primary = model.primary_method(task.id)
        docs.append(
            Document(
                doc_id=_doc_id(model, TASK, task.id),
                category=TASK,
                title=task.name,
                text=_render_task(task),
                source_ref=task.id,
                associated_method_ref=method_doc_ids.get(primary.id) if primary else None,
            )
        )
    for method in model.methods:
        docs.append(
            Document(
                doc_id=method_doc_ids[method.id],
                category=METHOD,
                title=method_title(model, method),
                text=_render_method(model, method),
                source_ref=method.id,
            )
        )
    return docs


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a)) * float(np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b)) / norm


def build_index(docs: list[Document], embedder: Embedder) -> Index:
    if not docs:
        raise EmptyCorpus("no documents to index")
    entries = tuple(
        (doc.doc_id, embedder.embed(f"{doc.title}\n{doc.text}"), doc.category)
        for doc in docs
    )
    return Index(
        dimension=embedder.dimension,
        entries=entries,
        documents={doc.doc_id: doc for doc in docs},
    )


def top_k(
    index: Index,
    query: str,
    k: int,
    embedder: Embedder,
    categories: Optional[set[str]] = None,
) -> list[ScoredDocument]:
    """Exact cosine ranking over every entry passing the category filter;
    descending score, ties by ascending doc_id."""
    if k < 1:
        raise ValueError("k must be at least 1")
    query_vector = embedder.embed(query)
    scored = [
        ScoredDocument(index.documents[doc_id], cosine(query_vector, vector))
        for doc_id, vector, category in index.entries
        if categories is None or category in categories
    ]
    scored.sort(key=lambda s: (-s.score, s.document.doc_id))
    return scored[:k]


def select_for_category(
    index: Index,
    query: str,
    category: str,
    k_score: int,
    embedder: Embedder,
) -> RetrievalSet:
    """Category-specific retrieval policy feeding answer generation."""
    if category == "KnowledgeModel":
        docs = top_k(index, query, k_score, embedder, categories={KNOWLEDGE})
        return RetrievalSet(category, tuple(docs))
    if category == "MultiModel":
        docs = top_k(index, query, k_score, embedder, categories=set(DOC_CATEGORIES))
        return RetrievalSet(category, tuple(docs))
    if category == "MethodTaskModel":
        best = top_k(index, query, 1, embedder, categories={TASK})
        if not best:
            return RetrievalSet(category, ())
        task_doc = best[0]
        ref = task_doc.document.associated_method_ref
        if ref is None or ref not in index.documents:
            raise MissingAssociatedMethod(task_doc.document.doc_id)
        method_doc = index.documents[ref]
        method_vector = next(v for d, v, _ in index.entries if d == ref)
        method_scored = ScoredDocument(method_doc, cosine(embedder.embed(query), method_vector))
        return RetrievalSet(category, (task_doc, method_scored))
    raise ValueError(f"no retrieval policy for category {category!r}")
