"""Lower ground formulas to Python closures over an index-addressed assignment."""

from __future__ import annotations

import operator
from typing import Callable, Mapping, Sequence

from ..lang.ast import And, Arith, Atom, BoolVal, Compare, Iff, Implies, IntConst, Not, Or
from .evaluate import Undefined, arith

_REL = {
    "<": operator.lt,
    ">": operator.gt,
    "<=": operator.le,
    ">=": operator.ge,
    "=": operator.eq,
    "!=": operator.ne,
}

Values = Sequence
Predicate = Callable[[Values], bool]


def _num(expr, index: Mapping[Atom, int]) -> Callable[[Values], object]:
    if isinstance(expr, IntConst):
        v = expr.value
        return lambda vals: v
    if isinstance(expr, Atom):
        i = index[expr]
        return lambda vals: vals[i]
    if isinstance(expr, Arith):
        lhs, rhs, op = _num(expr.lhs, index), _num(expr.rhs, index), expr.op
        if op == "+":
            return lambda vals: lhs(vals) + rhs(vals)
        if op == "-":
            return lambda vals: lhs(vals) - rhs(vals)
        if op == "*":
            return lambda vals: lhs(vals) * rhs(vals)
        return lambda vals: arith(op, lhs(vals), rhs(vals))
    raise TypeError(f"not a numeric expression: {expr!r}")


def compile_formula(formula, index: Mapping[Atom, int]) -> Predicate:
    if isinstance(formula, Atom):
        i = index[formula]
        return lambda vals: vals[i]
    if isinstance(formula, BoolVal):
        v = formula.value
        return lambda vals: v
    if isinstance(formula, Not):
        inner = compile_formula(formula.arg, index)
        return lambda vals: not inner(vals)
    if isinstance(formula, And):
        parts = [compile_formula(a, index) for a in formula.args]
        return lambda vals: all(p(vals) for p in parts)
    if isinstance(formula, Or):
        parts = [compile_formula(a, index) for a in formula.args]
        return lambda vals: any(p(vals) for p in parts)
    if isinstance(formula, Implies):
        lhs, rhs = compile_formula(formula.lhs, index), compile_formula(formula.rhs, index)
        return lambda vals: (not lhs(vals)) or rhs(vals)
    if isinstance(formula, Iff):
        lhs, rhs = compile_formula(formula.lhs, index), compile_formula(formula.rhs, index)
        return lambda vals: bool(lhs(vals)) == bool(rhs(vals))
    if isinstance(formula, Compare):
        rel = _REL[formula.op]
        l, r = formula.lhs, formula.rhs
        # fast paths for the shapes ordering puzzles produce
        if isinstance(l, Atom) and isinstance(r, Atom):
            i, j = index[l], index[r]
            return lambda vals: rel(vals[i], vals[j])
        if isinstance(l, Atom) and isinstance(r, IntConst):
            i, c = index[l], r.value
            return lambda vals: rel(vals[i], c)
        lhs, rhs = _num(l, index), _num(r, index)

        def cmp(vals) -> bool:
            try:
                return rel(lhs(vals), rhs(vals))
            except Undefined:
                return False

        return cmp
    raise TypeError(f"cannot compile {formula!r}")
