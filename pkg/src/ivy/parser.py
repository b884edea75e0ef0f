"""Parsing and serialization of the ``.tmk.json`` model format.

The format is documented in docs/tmk-schema.md.  Parsing resolves structure
and field types only; cross-reference and type checks live in
:mod:`ivy.validation`.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import TmkSchemaError, TmkSyntaxError
from .expressions import Expression, is_enum_literal, OPERATORS
from .model import (
    VALUE_KINDS,
    ENTITY_KINDS,
    Action,
    KnowledgeEntity,
    Method,
    ParameterSpec,
    State,
    Task,
    TmkModel,
    Transition,
)


def parse_model(text: str) -> TmkModel:
    """Parse a TMK document into a model.

    Raises TmkSyntaxError for malformed JSON (with line/column) and
    TmkSchemaError for structurally invalid documents.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TmkSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    if not isinstance(data, dict):
        raise TmkSchemaError("top level must be an object")
    return model_from_dict(data)


def serialize_model(model: TmkModel) -> str:
    """Canonical text form; deterministic, round-trips through parse_model."""
    return json.dumps(model_to_dict(model), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# dict -> model

def _req(data: dict, key: str, kind: type, path: str) -> Any:
    if key not in data:
        raise TmkSchemaError(f"missing required field {key!r}", path)
    value = data[key]
    if kind is int and isinstance(value, bool):
        raise TmkSchemaError(f"field {key!r} must be {kind.__name__}", path)
    if not isinstance(value, kind):
        raise TmkSchemaError(
            f"field {key!r} must be {kind.__name__}, got {type(value).__name__}", path
        )
    return value


def _opt(data: dict, key: str, kind: type, path: str, default: Any = None) -> Any:
    if key not in data or data[key] is None:
        return default
    return _req(data, key, kind, path)


def _check_expr_shape(expr: Any, path: str) -> Expression:
    if isinstance(expr, (bool, int, str)):
        return expr
    if isinstance(expr, list):
        if not expr or not isinstance(expr[0], str):
            raise TmkSchemaError("expression list must start with an operator string", path)
        op = expr[0]
        if op not in OPERATORS:
            raise TmkSchemaError(f"unknown expression operator {op!r}", path)
        if op == "enum":
            if len(expr) != 2 or not isinstance(expr[1], str):
                raise TmkSchemaError('enum literal must be ["enum", "<value>"]', path)
            return expr
        for i, arg in enumerate(expr[1:]):
            _check_expr_shape(arg, f"{path}[{i}]")
        return expr
    raise TmkSchemaError(f"not an expression: {expr!r}", path)


def _parameter_from(data: Any, path: str) -> ParameterSpec:
    if not isinstance(data, dict):
        raise TmkSchemaError("parameter must be an object", path)
    name = _req(data, "name", str, path)
    value_kind = _req(data, "value_kind", str, path)
    if value_kind not in VALUE_KINDS:
        raise TmkSchemaError(f"value_kind must be one of {VALUE_KINDS}", path)
    enum_values = _opt(data, "enum_values", list, path)
    if enum_values is not None:
        if not all(isinstance(v, str) for v in enum_values):
            raise TmkSchemaError("enum_values must be strings", path)
        enum_values = tuple(enum_values)
    constraint = data.get("constraint")
    if constraint is not None:
        constraint = _check_expr_shape(constraint, f"{path}.constraint")
    return ParameterSpec(name=name, value_kind=value_kind, enum_values=enum_values, constraint=constraint)


def _state_from(data: Any, path: str) -> State:
    if not isinstance(data, dict):
        raise TmkSchemaError("state must be an object", path)
    return State(
        id=_req(data, "id", str, path),
        name=_req(data, "name", str, path),
        description=_req(data, "description", str, path),
        sub_task_ref=_opt(data, "sub_task_ref", str, path),
    )


def _action_from(data: Any, path: str) -> Action:
    if not isinstance(data, dict):
        raise TmkSchemaError("action must be an object", path)
    slot = _req(data, "slot", str, path)
    expr = data.get("expression")
    if expr is None:
        raise TmkSchemaError("missing required field 'expression'", path)
    return Action(slot=slot, expression=_check_expr_shape(expr, f"{path}.expression"))


def _transition_from(data: Any, path: str) -> Transition:
    if not isinstance(data, dict):
        raise TmkSchemaError("transition must be an object", path)
    condition = data.get("condition")
    if condition is None:
        raise TmkSchemaError("missing required field 'condition'", path)
    actions = _opt(data, "actions", list, path, default=[])
    return Transition(
        id=_req(data, "id", str, path),
        from_state=_req(data, "from_state", str, path),
        to_state=_req(data, "to_state", str, path),
        description=_req(data, "description", str, path),
        condition=_check_expr_shape(condition, f"{path}.condition"),
        actions=tuple(
            _action_from(a, f"{path}.actions[{i}]") for i, a in enumerate(actions)
        ),
    )


def _method_from(data: Any, path: str) -> Method:
    if not isinstance(data, dict):
        raise TmkSchemaError("method must be an object", path)
    states = _req(data, "states", list, path)
    transitions = _req(data, "transitions", list, path)
    end_states = _req(data, "end_states", list, path)
    if not all(isinstance(s, str) for s in end_states):
        raise TmkSchemaError("end_states must be strings", path)
    invariant = data.get("invariant")
    if invariant is not None:
        invariant = _check_expr_shape(invariant, f"{path}.invariant")
    return Method(
        id=_req(data, "id", str, path),
        task_ref=_req(data, "task_ref", str, path),
        description=_req(data, "description", str, path),
        states=tuple(_state_from(s, f"{path}.states[{i}]") for i, s in enumerate(states)),
        transitions=tuple(
            _transition_from(t, f"{path}.transitions[{i}]") for i, t in enumerate(transitions)
        ),
        start_state=_req(data, "start_state", str, path),
        end_states=frozenset(end_states),
        invariant=invariant,
    )


def _task_from(data: Any, path: str) -> Task:
    if not isinstance(data, dict):
        raise TmkSchemaError("task must be an object", path)
    givens = _opt(data, "givens", list, path, default=[])
    makes = _opt(data, "makes", list, path, default=[])
    return Task(
        id=_req(data, "id", str, path),
        name=_req(data, "name", str, path),
        description=_req(data, "description", str, path),
        givens=tuple(_parameter_from(p, f"{path}.givens[{i}]") for i, p in enumerate(givens)),
        makes=tuple(_parameter_from(p, f"{path}.makes[{i}]") for i, p in enumerate(makes)),
    )


def _entity_from(data: Any, path: str) -> KnowledgeEntity:
    if not isinstance(data, dict):
        raise TmkSchemaError("knowledge entity must be an object", path)
    kind = _req(data, "kind", str, path)
    if kind not in ENTITY_KINDS:
        raise TmkSchemaError(f"kind must be one of {ENTITY_KINDS}", path)
    properties = _opt(data, "properties", dict, path, default={})
    for pname, pkind in properties.items():
        if pkind not in VALUE_KINDS:
            raise TmkSchemaError(
                f"property {pname!r} value_kind must be one of {VALUE_KINDS}", path
            )
    relations = _opt(data, "relations", list, path, default=[])
    parsed_relations = []
    for i, rel in enumerate(relations):
        if (
            not isinstance(rel, list)
            or len(rel) != 2
            or not all(isinstance(x, str) for x in rel)
        ):
            raise TmkSchemaError(
                "relation must be a [relation_name, target_entity_id] pair",
                f"{path}.relations[{i}]",
            )
        parsed_relations.append((rel[0], rel[1]))
    return KnowledgeEntity(
        id=_req(data, "id", str, path),
        name=_req(data, "name", str, path),
        kind=kind,
        description=_req(data, "description", str, path),
        properties=dict(properties),
        relations=tuple(parsed_relations),
    )


def model_from_dict(data: dict) -> TmkModel:
    path = "model"
    tasks = _opt(data, "tasks", list, path, default=[])
    methods = _opt(data, "methods", list, path, default=[])
    knowledge = _opt(data, "knowledge", list, path, default=[])
    default_initial = _opt(data, "default_initial", dict, path)
    if default_initial is not None:
        for slot, value in default_initial.items():
            if not isinstance(value, (bool, int, str)):
                raise TmkSchemaError(
                    f"default_initial[{slot!r}] must be an integer, boolean or enum string", path
                )
    return TmkModel(
        id=_req(data, "id", str, path),
        title=_req(data, "title", str, path),
        description=_req(data, "description", str, path),
        tasks=tuple(_task_from(t, f"tasks[{i}]") for i, t in enumerate(tasks)),
        methods=tuple(_method_from(m, f"methods[{i}]") for i, m in enumerate(methods)),
        knowledge=tuple(_entity_from(e, f"knowledge[{i}]") for i, e in enumerate(knowledge)),
        default_initial=dict(default_initial) if default_initial is not None else None,
    )


# ---------------------------------------------------------------------------
# model -> dict

def _parameter_to(p: ParameterSpec) -> dict:
    out: dict[str, Any] = {"name": p.name, "value_kind": p.value_kind}
    if p.enum_values is not None:
        out["enum_values"] = list(p.enum_values)
    if p.constraint is not None:
        out["constraint"] = p.constraint
    return out


def _state_to(s: State) -> dict:
    out: dict[str, Any] = {"id": s.id, "name": s.name, "description": s.description}
    if s.sub_task_ref is not None:
        out["sub_task_ref"] = s.sub_task_ref
    return out


def _transition_to(t: Transition) -> dict:
    out: dict[str, Any] = {
        "id": t.id,
        "from_state": t.from_state,
        "to_state": t.to_state,
        "description": t.description,
        "condition": t.condition,
    }
    if t.actions:
        out["actions"] = [{"slot": a.slot, "expression": a.expression} for a in t.actions]
    return out


def _method_to(m: Method) -> dict:
    out: dict[str, Any] = {
        "id": m.id,
        "task_ref": m.task_ref,
        "description": m.description,
        "states": [_state_to(s) for s in m.states],
        "transitions": [_transition_to(t) for t in m.transitions],
        "start_state": m.start_state,
        "end_states": sorted(m.end_states),
    }
    if m.invariant is not None:
        out["invariant"] = m.invariant
    return out


def _task_to(t: Task) -> dict:
    out: dict[str, Any] = {"id": t.id, "name": t.name, "description": t.description}
    if t.givens:
        out["givens"] = [_parameter_to(p) for p in t.givens]
    if t.makes:
        out["makes"] = [_parameter_to(p) for p in t.makes]
    return out


def _entity_to(e: KnowledgeEntity) -> dict:
    out: dict[str, Any] = {
        "id": e.id,
        "name": e.name,
        "kind": e.kind,
        "description": e.description,
    }
    if e.properties:
        out["properties"] = dict(e.properties)
    if e.relations:
        out["relations"] = [list(r) for r in e.relations]
    return out


def model_to_dict(model: TmkModel) -> dict:
    out: dict[str, Any] = {
        "id": model.id,
        "title": model.title,
        "description": model.description,
        "tasks": [_task_to(t) for t in model.tasks],
        "methods": [_method_to(m) for m in model.methods],
        "knowledge": [_entity_to(e) for e in model.knowledge],
    }
    if model.default_initial is not None:
        out["default_initial"] = dict(model.default_initial)
    return out
