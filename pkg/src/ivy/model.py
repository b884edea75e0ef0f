"""Task-Method-Knowledge data model.

All types are immutable after parsing; safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .expressions import Expression, SlotType, SlotValue

VALUE_KINDS = ("integer", "boolean", "enum")
ENTITY_KINDS = ("concept", "object", "relation")

DEFAULT_SUBTASK_DEPTH = 8


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    value_kind: str
    enum_values: tuple[str, ...] | None = None
    constraint: Optional[Expression] = None

    @property
    def slot_type(self) -> SlotType:
        if self.value_kind == "enum":
            return ("enum", tuple(self.enum_values or ()))
        return self.value_kind


@dataclass(frozen=True)
class Task:
    id: str
    name: str
    description: str
    givens: tuple[ParameterSpec, ...] = ()
    makes: tuple[ParameterSpec, ...] = ()

    @property
    def parameters(self) -> tuple[ParameterSpec, ...]:
        return self.givens + self.makes

    def slot_types(self) -> dict[str, SlotType]:
        """Declared slot universe for methods of this task: givens plus makes."""
        return {p.name: p.slot_type for p in self.parameters}


@dataclass(frozen=True)
class State:
    id: str
    name: str
    description: str
    sub_task_ref: str | None = None


@dataclass(frozen=True)
class Action:
    slot: str
    expression: Expression


@dataclass(frozen=True)
class Transition:
    id: str
    from_state: str
    to_state: str
    description: str
    condition: Expression
    actions: tuple[Action, ...] = ()


@dataclass(frozen=True)
class Method:
    id: str
    task_ref: str
    description: str
    states: tuple[State, ...]
    transitions: tuple[Transition, ...]
    start_state: str
    end_states: frozenset[str]
    invariant: Optional[Expression] = None

    def state(self, state_id: str) -> State:
        for s in self.states:
            if s.id == state_id:
                return s
        raise KeyError(state_id)

    def outgoing(self, state_id: str) -> tuple[Transition, ...]:
        """Transitions leaving ``state_id`` in declaration order."""
        return tuple(t for t in self.transitions if t.from_state == state_id)


@dataclass(frozen=True)
class KnowledgeEntity:
    id: str
    name: str
    kind: str
    description: str
    properties: dict[str, str] = field(default_factory=dict)
    relations: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True)
class TmkModel:
    id: str
    title: str
    description: str
    tasks: tuple[Task, ...] = ()
    methods: tuple[Method, ...] = ()
    knowledge: tuple[KnowledgeEntity, ...] = ()
    default_initial: dict[str, SlotValue] | None = None

    def task(self, task_id: str) -> Task:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)

    def entity(self, entity_id: str) -> KnowledgeEntity:
        for e in self.knowledge:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)

    def methods_for(self, task_id: str) -> tuple[Method, ...]:
        return tuple(m for m in self.methods if m.task_ref == task_id)

    def primary_method(self, task_id: str) -> Method | None:
        """First declared method for a task, the one simulation runs."""
        for m in self.methods:
            if m.task_ref == task_id:
                return m
        return None

    def transition(self, transition_id: str) -> Transition:
        for m in self.methods:
            for t in m.transitions:
                if t.id == transition_id:
                    return t
        raise KeyError(transition_id)

    def summary_counts(self) -> Mapping[str, int]:
        return {
            "tasks": len(self.tasks),
            "methods": len(self.methods),
            "knowledge": len(self.knowledge),
        }
