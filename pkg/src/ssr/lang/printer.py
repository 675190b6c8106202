"""Pretty-printer emitting the minimal parentheses the parser needs."""

from __future__ import annotations

from .ast import (
    And,
    Arith,
    Atom,
    BoolVal,
    Compare,
    Exists,
    ForAll,
    Iff,
    Implies,
    IntConst,
    Not,
    Obj,
    Or,
    Var,
)

# formula binding strengths
_QUANT, _IFF, _IMP, _OR, _AND, _NOT, _PRIM = range(7)
# numeric binding strengths
_SUM, _TERM, _POW, _UNARY = range(10, 14)


def _paren(text: str, wrap: bool) -> str:
    return f"({text})" if wrap else text


def atom_text(atom: Atom) -> str:
    args = ", ".join(a.name for a in atom.args)
    return f"{atom.name}({args})"


def _num(e, ctx: int) -> str:
    if isinstance(e, IntConst):
        return str(e.value)
    if isinstance(e, Atom):
        return atom_text(e)
    if isinstance(e, Arith):
        if e.op in ("+", "-"):
            return _paren(f"{_num(e.lhs, _SUM)} {e.op} {_num(e.rhs, _TERM)}", ctx > _SUM)
        if e.op in ("*", "/", "//"):
            return _paren(f"{_num(e.lhs, _TERM)} {e.op} {_num(e.rhs, _POW)}", ctx > _TERM)
        if e.op == "**":
            return _paren(f"{_num(e.lhs, _UNARY)} ** {_num(e.rhs, _POW)}", ctx > _POW)
    raise TypeError(f"not a numeric expression: {e!r}")


def _fmt(f, ctx: int) -> str:
    if isinstance(f, Atom):
        return atom_text(f)
    if isinstance(f, BoolVal):
        return f"BoolVal({'True' if f.value else 'False'})"
    if isinstance(f, Compare):
        return f"{_num(f.lhs, _SUM)} {f.op} {_num(f.rhs, _SUM)}"
    if isinstance(f, Not):
        return f"not {_fmt(f.arg, _NOT)}"
    if isinstance(f, And):
        return _paren(" and ".join(_fmt(a, _AND + 1) for a in f.args), ctx > _AND)
    if isinstance(f, Or):
        return _paren(" or ".join(_fmt(a, _OR + 1) for a in f.args), ctx > _OR)
    if isinstance(f, Implies):
        return _paren(f"{_fmt(f.lhs, _IMP + 1)} -> {_fmt(f.rhs, _IMP)}", ctx > _IMP)
    if isinstance(f, Iff):
        return _paren(f"{_fmt(f.lhs, _IFF + 1)} <-> {_fmt(f.rhs, _IFF)}", ctx > _IFF)
    if isinstance(f, (ForAll, Exists)):
        kw = "forall" if isinstance(f, ForAll) else "exists"
        return _paren(f"{kw} {f.var}. {_fmt(f.body, _QUANT)}", ctx > _QUANT)
    raise TypeError(f"not a formula: {f!r}")


def to_text(f) -> str:
    """Render a formula or numeric expression in surface syntax."""
    if isinstance(f, (IntConst, Arith)):
        return _num(f, _SUM)
    return _fmt(f, _QUANT)


def to_text_full(f) -> str:
    """Fully parenthesised rendering (every compound operand wrapped)."""

    def num(e) -> str:
        if isinstance(e, IntConst):
            return str(e.value) if e.value >= 0 else f"({e.value})"
        if isinstance(e, Atom):
            return atom_text(e)
        return f"({num(e.lhs)} {e.op} {num(e.rhs)})"

    def fm(g) -> str:
        if isinstance(g, (Atom, BoolVal)):
            return _fmt(g, _PRIM)
        if isinstance(g, Compare):
            return f"({num(g.lhs)} {g.op} {num(g.rhs)})"
        if isinstance(g, Not):
            return f"(not {fm(g.arg)})"
        if isinstance(g, And):
            return "(" + " and ".join(fm(a) for a in g.args) + ")"
        if isinstance(g, Or):
            return "(" + " or ".join(fm(a) for a in g.args) + ")"
        if isinstance(g, Implies):
            return f"({fm(g.lhs)} -> {fm(g.rhs)})"
        if isinstance(g, Iff):
            return f"({fm(g.lhs)} <-> {fm(g.rhs)})"
        kw = "forall" if isinstance(g, ForAll) else "exists"
        return f"({kw} {g.var}. {fm(g.body)})"

    return fm(f)


__all__ = ["to_text", "to_text_full", "atom_text", "Obj", "Var"]
