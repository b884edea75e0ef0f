"""Structural validation of parsed models.

Problems are data, not exceptions: errors block simulation and indexing,
warnings do not.  Hand-authored models are allowed to be partial, so
reachability problems and orphan tasks are warnings only.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

from .errors import MissingSlot, TypeMismatch
from .expressions import expression_kind, slots_in
from .model import Method, Task, TmkModel


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.errors

    def error(self, message: str) -> None:
        self.errors.append(message)

    def warn(self, message: str) -> None:
        self.warnings.append(message)


def validate_model(model: TmkModel) -> ValidationReport:
    report = ValidationReport()
    _check_unique_ids(model, report)
    task_ids = {t.id for t in model.tasks}
    entity_ids = {e.id for e in model.knowledge}

    for task in model.tasks:
        _check_task(task, report)

    for entity in model.knowledge:
        for relation_name, target in entity.relations:
            if target not in entity_ids:
                report.error(
                    f"knowledge entity {entity.id!r}: relation {relation_name!r} "
                    f"targets unknown entity {target!r}"
                )

    for method in model.methods:
        if method.task_ref not in task_ids:
            report.error(f"method {method.id!r}: task_ref {method.task_ref!r} does not exist")
            continue
        _check_method(model, method, report)

    tasks_with_methods = {m.task_ref for m in model.methods}
    for task in model.tasks:
        if task.id not in tasks_with_methods:
            report.warn(f"task {task.id!r} has no method (orphan task)")

    _check_default_initial(model, report)
    return report


def _check_unique_ids(model: TmkModel, report: ValidationReport) -> None:
    ids: list[str] = [t.id for t in model.tasks]
    ids += [m.id for m in model.methods]
    ids += [e.id for e in model.knowledge]
    for method in model.methods:
        ids += [s.id for s in method.states]
        ids += [t.id for t in method.transitions]
    for value, count in Counter(ids).items():
        if count > 1:
            report.error(f"duplicate id {value!r} ({count} declarations)")


def _check_task(task: Task, report: ValidationReport) -> None:
    names = [p.name for p in task.parameters]
    for name, count in Counter(names).items():
        if count > 1:
            report.error(f"task {task.id!r}: parameter {name!r} declared {count} times")
    for param in task.parameters:
        if param.value_kind == "enum" and not param.enum_values:
            report.error(f"task {task.id!r}: enum parameter {param.name!r} has no enum_values")
        if param.value_kind != "enum" and param.enum_values is not None:
            report.error(
                f"task {task.id!r}: parameter {param.name!r} has enum_values "
                f"but value_kind {param.value_kind!r}"
            )
    slot_types = task.slot_types()
    for param in task.parameters:
        if param.constraint is None:
            continue
        where = f"task {task.id!r}: constraint of {param.name!r}"
        _check_boolean_expression(param.constraint, slot_types, where, report)


def _check_method(model: TmkModel, method: Method, report: ValidationReport) -> None:
    state_ids = {s.id for s in method.states}
    task_ids = {t.id for t in model.tasks}
    if method.start_state not in state_ids:
        report.error(f"method {method.id!r}: start_state {method.start_state!r} not declared")
    for end in method.end_states:
        if end not in state_ids:
            report.error(f"method {method.id!r}: end state {end!r} not declared")
    for state in method.states:
        if state.sub_task_ref is not None and state.sub_task_ref not in task_ids:
            report.error(
                f"method {method.id!r}: state {state.id!r} references "
                f"unknown sub-task {state.sub_task_ref!r}"
            )

    slot_types = model.task(method.task_ref).slot_types() if method.task_ref in task_ids else {}

    for transition in method.transitions:
        where = f"method {method.id!r}: transition {transition.id!r}"
        if transition.from_state not in state_ids:
            report.error(f"{where}: from_state {transition.from_state!r} not declared")
        if transition.to_state not in state_ids:
            report.error(f"{where}: to_state {transition.to_state!r} not declared")
        _check_boolean_expression(transition.condition, slot_types, f"{where} condition", report)
        for action in transition.actions:
            if action.slot not in slot_types:
                report.error(f"{where}: action assigns undeclared slot {action.slot!r}")
                continue
            dangling = slots_in(action.expression) - set(slot_types)
            if dangling:
                report.error(f"{where}: action references undeclared slots {sorted(dangling)}")
                continue
            try:
                kind = expression_kind(action.expression, slot_types)
            except (TypeMismatch, MissingSlot) as exc:
                report.error(f"{where}: action expression ill-typed: {exc}")
                continue
            declared = slot_types[action.slot]
            declared_kind = declared if isinstance(declared, str) else "enum"
            if kind != declared_kind:
                report.error(
                    f"{where}: action assigns {kind} expression to "
                    f"{declared_kind} slot {action.slot!r}"
                )

    if method.invariant is not None:
        _check_boolean_expression(
            method.invariant, slot_types, f"method {method.id!r} invariant", report
        )

    _check_reachability(method, report)


def _check_boolean_expression(expr, slot_types, where: str, report: ValidationReport) -> None:
    dangling = slots_in(expr) - set(slot_types)
    if dangling:
        report.error(f"{where} references undeclared slots {sorted(dangling)}")
        return
    try:
        kind = expression_kind(expr, slot_types)
    except (TypeMismatch, MissingSlot) as exc:
        report.error(f"{where} is ill-typed: {exc}")
        return
    if kind != "boolean":
        report.error(f"{where} must be boolean, found {kind}")


def _check_reachability(method: Method, report: ValidationReport) -> None:
    state_ids = {s.id for s in method.states}
    if method.start_state not in state_ids:
        return
    reachable = {method.start_state}
    frontier = deque([method.start_state])
    while frontier:
        current = frontier.popleft()
        for transition in method.transitions:
            if transition.from_state == current and transition.to_state not in reachable:
                reachable.add(transition.to_state)
                frontier.append(transition.to_state)
    for state in method.states:
        if state.id not in reachable:
            report.warn(f"method {method.id!r}: state {state.id!r} unreachable from start")
    if not (method.end_states & reachable):
        report.warn(f"method {method.id!r}: no end state reachable from start")


def _check_default_initial(model: TmkModel, report: ValidationReport) -> None:
    if model.default_initial is None:
        return
    declared: dict[str, object] = {}
    for task in model.tasks:
        declared.update(task.slot_types())
    for slot, value in model.default_initial.items():
        if slot not in declared:
            report.warn(f"default_initial: slot {slot!r} not declared by any task")
            continue
        slot_type = declared[slot]
        if isinstance(slot_type, tuple):
            if not isinstance(value, str) or value not in slot_type[1]:
                report.error(
                    f"default_initial: {slot!r} must be one of {sorted(slot_type[1])}, got {value!r}"
                )
        elif slot_type == "boolean":
            if not isinstance(value, bool):
                report.error(f"default_initial: {slot!r} must be boolean, got {value!r}")
        else:
            if isinstance(value, bool) or not isinstance(value, int):
                report.error(f"default_initial: {slot!r} must be an integer, got {value!r}")
