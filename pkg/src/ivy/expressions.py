"""Evaluation, type checking and rendering of condition/action expressions.

Expressions are prefix-notation JSON trees: integer and boolean literals,
slot-reference strings, ``["enum", value]`` literals, binary arithmetic
``+``/``-``, comparisons ``=  !=  <  <=  >  >=`` and the connectives
``and``/``or`` (n-ary) and ``not``.  Comparisons other than ``=``/``!=``
require integer operands; ``=``/``!=`` also accept a pair of enum operands.
"""

from __future__ import annotations

from typing import Mapping, Union

from .errors import MissingSlot, TypeMismatch

SlotValue = Union[int, bool, str]
Expression = Union[int, bool, str, list]

# Slot type descriptors: "integer", "boolean", or ("enum", (values...)).
SlotType = Union[str, tuple]

_ARITH = ("+", "-")
_ORDER_CMP = ("<", "<=", ">", ">=")
_EQ_CMP = ("=", "!=")
_CONNECTIVES = ("and", "or", "not")

OPERATORS = _ARITH + _ORDER_CMP + _EQ_CMP + _CONNECTIVES + ("enum",)


def is_enum_literal(expr: Expression) -> bool:
    return isinstance(expr, list) and len(expr) == 2 and expr[0] == "enum"


def slots_in(expr: Expression) -> set[str]:
    """All slot names referenced anywhere in the tree."""
    if isinstance(expr, str):
        return {expr}
    if isinstance(expr, list) and not is_enum_literal(expr):
        found: set[str] = set()
        for arg in expr[1:]:
            found |= slots_in(arg)
        return found
    return set()


def _as_int(value: SlotValue, context: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeMismatch(f"{context} requires an integer operand, got {value!r}")
    return value


def _as_bool(value: SlotValue, context: str) -> bool:
    if not isinstance(value, bool):
        raise TypeMismatch(f"{context} requires a boolean operand, got {value!r}")
    return value


def eval_expression(expr: Expression, world: Mapping[str, SlotValue]) -> SlotValue:
    """Evaluate ``expr`` against ``world``.  Pure; raises MissingSlot/TypeMismatch.

    Conditions and invariants evaluate to bool; action expressions may also
    evaluate to int or to an enum string.
    """
    if isinstance(expr, bool):
        return expr
    if isinstance(expr, int):
        return expr
    if isinstance(expr, str):
        if expr not in world:
            raise MissingSlot(expr)
        return world[expr]
    if not isinstance(expr, list) or not expr:
        raise TypeMismatch(f"not an expression: {expr!r}")

    op = expr[0]
    if op == "enum":
        return expr[1]
    args = expr[1:]
    if op in _ARITH:
        left = _as_int(eval_expression(args[0], world), op)
        right = _as_int(eval_expression(args[1], world), op)
        return left + right if op == "+" else left - right
    if op in _ORDER_CMP:
        left = _as_int(eval_expression(args[0], world), op)
        right = _as_int(eval_expression(args[1], world), op)
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    if op in _EQ_CMP:
        left = eval_expression(args[0], world)
        right = eval_expression(args[1], world)
        if isinstance(left, bool) or isinstance(right, bool):
            raise TypeMismatch(f"{op} does not take boolean operands")
        if isinstance(left, str) != isinstance(right, str):
            raise TypeMismatch(f"{op} operands must both be integers or both enums")
        return left == right if op == "=" else left != right
    if op == "and":
        return all(_as_bool(eval_expression(a, world), "and") for a in args)
    if op == "or":
        return any(_as_bool(eval_expression(a, world), "or") for a in args)
    if op == "not":
        return not _as_bool(eval_expression(args[0], world), "not")
    raise TypeMismatch(f"unknown operator {op!r}")


def expression_kind(expr: Expression, slot_types: Mapping[str, SlotType]) -> str:
    """Static kind of ``expr``: "integer", "boolean" or "enum".

    Raises TypeMismatch for ill-typed trees, KeyError-like MissingSlot for
    references to slots absent from ``slot_types``.
    """
    if isinstance(expr, bool):
        return "boolean"
    if isinstance(expr, int):
        return "integer"
    if isinstance(expr, str):
        if expr not in slot_types:
            raise MissingSlot(expr)
        declared = slot_types[expr]
        return declared if isinstance(declared, str) else "enum"
    if not isinstance(expr, list) or not expr:
        raise TypeMismatch(f"not an expression: {expr!r}")

    op = expr[0]
    args = expr[1:]
    if op == "enum":
        return "enum"
    if op in _ARITH:
        _expect_arity(op, args, 2)
        for a in args:
            if expression_kind(a, slot_types) != "integer":
                raise TypeMismatch(f"{op} takes integer operands")
        return "integer"
    if op in _ORDER_CMP:
        _expect_arity(op, args, 2)
        for a in args:
            if expression_kind(a, slot_types) != "integer":
                raise TypeMismatch(f"{op} takes integer operands")
        return "boolean"
    if op in _EQ_CMP:
        _expect_arity(op, args, 2)
        kinds = [expression_kind(a, slot_types) for a in args]
        if kinds[0] != kinds[1] or kinds[0] == "boolean":
            raise TypeMismatch(f"{op} takes two integers or two enums, got {kinds}")
        if kinds[0] == "enum":
            _check_enum_domain(op, args, slot_types)
        return "boolean"
    if op in ("and", "or"):
        if not args:
            raise TypeMismatch(f"{op} needs at least one operand")
        for a in args:
            if expression_kind(a, slot_types) != "boolean":
                raise TypeMismatch(f"{op} takes boolean operands")
        return "boolean"
    if op == "not":
        _expect_arity(op, args, 1)
        if expression_kind(args[0], slot_types) != "boolean":
            raise TypeMismatch("not takes a boolean operand")
        return "boolean"
    raise TypeMismatch(f"unknown operator {op!r}")


def _expect_arity(op: str, args: list, n: int) -> None:
    if len(args) != n:
        raise TypeMismatch(f"{op} takes {n} operand(s), got {len(args)}")


def _check_enum_domain(op: str, args: list, slot_types: Mapping[str, SlotType]) -> None:
    # When an enum slot is compared with an enum literal, the literal must
    # belong to the slot's declared value set.
    domains = []
    literals = []
    for a in args:
        if isinstance(a, str) and isinstance(slot_types.get(a), tuple):
            domains.append(slot_types[a][1])
        elif is_enum_literal(a):
            literals.append(a[1])
    for domain in domains:
        for lit in literals:
            if lit not in domain:
                raise TypeMismatch(f"enum value {lit!r} not in declared values {sorted(domain)}")


def render_expression(expr: Expression) -> str:
    """Human-readable infix form, used in documents and prompts."""
    if isinstance(expr, bool):
        return "true" if expr else "false"
    if isinstance(expr, int):
        return str(expr)
    if isinstance(expr, str):
        return expr
    op = expr[0]
    args = expr[1:]
    if op == "enum":
        return f"'{args[0]}'"
    if op == "not":
        return f"not {render_expression(args[0])}"
    if op in ("and", "or"):
        joined = f" {op} ".join(render_expression(a) for a in args)
        return f"({joined})"
    left, right = (render_expression(a) for a in args)
    return f"{left} {op} {right}"
