"""Independent expression evaluator used as a test oracle.

Written against the expression grammar before the package evaluator existed;
keep it a plain if/elif tree walk and do not share code with the package.
Grammar: int/bool literals, slot-name strings, ["enum", v], ["+"|"-", a, b],
comparisons =, !=, <, <=, >, >=, connectives and/or (n-ary), not.
"""

from __future__ import annotations


def oracle_eval(expr, world):
    if isinstance(expr, bool):
        return expr
    if isinstance(expr, int):
        return expr
    if isinstance(expr, str):
        if expr not in world:
            raise KeyError(expr)
        return world[expr]
    op = expr[0]
    if op == "enum":
        return expr[1]
    if op == "+":
        return oracle_eval(expr[1], world) + oracle_eval(expr[2], world)
    if op == "-":
        return oracle_eval(expr[1], world) - oracle_eval(expr[2], world)
    if op == "=":
        return oracle_eval(expr[1], world) == oracle_eval(expr[2], world)
    if op == "!=":
        return oracle_eval(expr[1], world) != oracle_eval(expr[2], world)
    if op == "<":
        return oracle_eval(expr[1], world) < oracle_eval(expr[2], world)
    if op == "<=":
        return oracle_eval(expr[1], world) <= oracle_eval(expr[2], world)
    if op == ">":
        return oracle_eval(expr[1], world) > oracle_eval(expr[2], world)
    if op == ">=":
        return oracle_eval(expr[1], world) >= oracle_eval(expr[2], world)
    if op == "and":
        result = True
        for arg in expr[1:]:
            result = result and oracle_eval(arg, world)
        return result
    if op == "or":
        result = False
        for arg in expr[1:]:
            result = result or oracle_eval(arg, world)
        return result
    if op == "not":
        return not oracle_eval(expr[1], world)
    raise ValueError(f"unknown operator {op!r}")
