"""Reference semantics for ground formulas.

This interpreter is deliberately simple; the search and dense engines are
checked against it.  ``/`` is exact rational division; a comparison whose
operands are undefined (division by zero, runaway powers) is false.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from ..errors import MissingAtom
from ..lang.ast import And, Arith, Atom, BoolVal, Compare, Exists, ForAll, Iff, Implies, IntConst, Not, Or

MAX_EXPONENT = 64


class Undefined(ArithmeticError):
    pass


def arith(op: str, a, b):
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "//":
        if b == 0:
            raise Undefined("floor division by zero")
        return a // b
    if op == "/":
        if b == 0:
            raise Undefined("division by zero")
        return Fraction(a) / Fraction(b)
    if op == "**":
        if b < 0:
            if a == 0:
                raise Undefined("zero to a negative power")
            return Fraction(1) / (Fraction(a) ** -b)
        if b > MAX_EXPONENT and abs(a) > 1:
            raise Undefined("exponent too large")
        if isinstance(b, Fraction):
            if b.denominator != 1:
                raise Undefined("fractional exponent")
            b = int(b)
        return a**b
    raise ValueError(f"unknown operator {op}")


def compare(op: str, a, b) -> bool:
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    if op == ">=":
        return a >= b
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    raise ValueError(f"unknown relation {op}")


def _lookup(model: Mapping[Atom, object], atom: Atom):
    try:
        return model[atom]
    except KeyError:
        raise MissingAtom(f"model has no value for {atom.name}") from None


def numeric_value(model: Mapping[Atom, object], expr):
    if isinstance(expr, IntConst):
        return expr.value
    if isinstance(expr, Atom):
        return _lookup(model, expr)
    if isinstance(expr, Arith):
        return arith(expr.op, numeric_value(model, expr.lhs), numeric_value(model, expr.rhs))
    raise TypeError(f"not a numeric expression: {expr!r}")


def evaluate(model: Mapping[Atom, object], formula) -> bool:
    """Truth value of a ground formula under a total model."""
    if isinstance(formula, Atom):
        return bool(_lookup(model, formula))
    if isinstance(formula, BoolVal):
        return formula.value
    if isinstance(formula, Not):
        return not evaluate(model, formula.arg)
    if isinstance(formula, And):
        return all(evaluate(model, a) for a in formula.args)
    if isinstance(formula, Or):
        return any(evaluate(model, a) for a in formula.args)
    if isinstance(formula, Implies):
        return (not evaluate(model, formula.lhs)) or evaluate(model, formula.rhs)
    if isinstance(formula, Iff):
        return evaluate(model, formula.lhs) == evaluate(model, formula.rhs)
    if isinstance(formula, Compare):
        try:
            return compare(formula.op, numeric_value(model, formula.lhs), numeric_value(model, formula.rhs))
        except Undefined:
            return False
    if isinstance(formula, (ForAll, Exists)):
        raise TypeError("evaluate expects a ground formula")
    raise TypeError(f"not a formula: {formula!r}")
