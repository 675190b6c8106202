"""AST for the restricted first-order language.

Nodes are frozen dataclasses, so structural equality and hashing come for
free.  A predicate application is an :class:`Atom`; it appears both as a
Boolean formula and as a numeric term, and its sort is decided globally
per problem (see :mod:`ssr.lang.problem`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True)
class Obj:
    """Object constant."""

    name: str


@dataclass(frozen=True)
class Var:
    """Variable bound by an enclosing quantifier."""

    name: str


Term = Union[Obj, Var]


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple[Term, ...] = ()

    @property
    def is_ground(self) -> bool:
        return all(isinstance(a, Obj) for a in self.args)


@dataclass(frozen=True)
class IntConst:
    value: int


ARITH_OPS = ("**", "*", "//", "/", "+", "-")


@dataclass(frozen=True)
class Arith:
    op: str
    lhs: "NumExpr"
    rhs: "NumExpr"


NumExpr = Union[IntConst, Atom, Arith]


@dataclass(frozen=True)
class BoolVal:
    value: bool


@dataclass(frozen=True)
class Not:
    arg: "Formula"


@dataclass(frozen=True)
class And:
    args: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.args) < 2:
            raise ValueError("And needs at least two members")


@dataclass(frozen=True)
class Or:
    args: tuple["Formula", ...]

    def __post_init__(self) -> None:
        if len(self.args) < 2:
            raise ValueError("Or needs at least two members")


@dataclass(frozen=True)
class Implies:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class Iff:
    lhs: "Formula"
    rhs: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


REL_OPS = ("<", ">", "<=", ">=", "=", "!=")


@dataclass(frozen=True)
class Compare:
    op: str
    lhs: NumExpr
    rhs: NumExpr


Formula = Union[Atom, BoolVal, Not, And, Or, Implies, Iff, ForAll, Exists, Compare]

TRUE = BoolVal(True)
FALSE = BoolVal(False)


def conj(parts: list["Formula"] | tuple["Formula", ...]) -> "Formula":
    """Build a conjunction, collapsing the 0- and 1-member cases."""
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return And(tuple(parts))


def disj(parts: list["Formula"] | tuple["Formula", ...]) -> "Formula":
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return Or(tuple(parts))


def children(node) -> tuple:
    if isinstance(node, (Not,)):
        return (node.arg,)
    if isinstance(node, (And, Or)):
        return node.args
    if isinstance(node, (Implies, Iff, Compare, Arith)):
        return (node.lhs, node.rhs)
    if isinstance(node, (ForAll, Exists)):
        return (node.body,)
    return ()


def walk(node) -> Iterator:
    """Pre-order traversal over formulas and numeric expressions."""
    stack = [node]
    while stack:
        cur = stack.pop()
        yield cur
        stack.extend(reversed(children(cur)))


def atoms_of(node) -> list[Atom]:
    """Atoms in first-occurrence order, without duplicates."""
    seen: dict[Atom, None] = {}
    for sub in walk(node):
        if isinstance(sub, Atom):
            seen.setdefault(sub, None)
    return list(seen)


def numeric_atoms_of(node) -> list[Atom]:
    """Atoms that occur in a numeric position (inside a Compare)."""
    seen: dict[Atom, None] = {}
    for sub in walk(node):
        if isinstance(sub, Compare):
            for side in (sub.lhs, sub.rhs):
                for inner in walk(side):
                    if isinstance(inner, Atom):
                        seen.setdefault(inner, None)
    return list(seen)


def boolean_atoms_of(node) -> list[Atom]:
    """Atoms used as formulas (not under a Compare)."""
    out: dict[Atom, None] = {}

    def visit(f) -> None:
        if isinstance(f, Atom):
            out.setdefault(f, None)
        elif isinstance(f, Compare):
            return
        else:
            for c in children(f):
                visit(c)

    visit(node)
    return list(out)


def int_constants_of(node) -> list[int]:
    return [sub.value for sub in walk(node) if isinstance(sub, IntConst)]


def arith_ops_of(node) -> set[str]:
    return {sub.op for sub in walk(node) if isinstance(sub, Arith)}


def map_atoms(node, fn):
    """Rebuild ``node`` with every Atom replaced by ``fn(atom)``."""
    if isinstance(node, Atom):
        return fn(node)
    if isinstance(node, (BoolVal, IntConst)):
        return node
    if isinstance(node, Not):
        return Not(map_atoms(node.arg, fn))
    if isinstance(node, And):
        return And(tuple(map_atoms(a, fn) for a in node.args))
    if isinstance(node, Or):
        return Or(tuple(map_atoms(a, fn) for a in node.args))
    if isinstance(node, Implies):
        return Implies(map_atoms(node.lhs, fn), map_atoms(node.rhs, fn))
    if isinstance(node, Iff):
        return Iff(map_atoms(node.lhs, fn), map_atoms(node.rhs, fn))
    if isinstance(node, ForAll):
        return ForAll(node.var, map_atoms(node.body, fn))
    if isinstance(node, Exists):
        return Exists(node.var, map_atoms(node.body, fn))
    if isinstance(node, Compare):
        return Compare(node.op, map_atoms(node.lhs, fn), map_atoms(node.rhs, fn))
    if isinstance(node, Arith):
        return Arith(node.op, map_atoms(node.lhs, fn), map_atoms(node.rhs, fn))
    raise TypeError(f"not an AST node: {node!r}")


def substitute(node, var: str, obj: Obj):
    """Replace free occurrences of ``var`` by ``obj``."""
    if isinstance(node, (ForAll, Exists)) and node.var == var:
        return node

    def swap(atom: Atom) -> Atom:
        if not any(isinstance(a, Var) and a.name == var for a in atom.args):
            return atom
        return Atom(atom.name, tuple(obj if isinstance(a, Var) and a.name == var else a for a in atom.args))

    if isinstance(node, (ForAll, Exists)):
        return type(node)(node.var, substitute(node.body, var, obj))
    if isinstance(node, (Not, And, Or, Implies, Iff)):
        # map_atoms stops at nothing, so recurse manually to respect shadowing
        if isinstance(node, Not):
            return Not(substitute(node.arg, var, obj))
        if isinstance(node, (And, Or)):
            return type(node)(tuple(substitute(a, var, obj) for a in node.args))
        return type(node)(substitute(node.lhs, var, obj), substitute(node.rhs, var, obj))
    return map_atoms(node, swap)


def free_vars(node, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(node, Atom):
        return {a.name for a in node.args if isinstance(a, Var) and a.name not in bound}
    if isinstance(node, (ForAll, Exists)):
        return free_vars(node.body, bound | {node.var})
    out: set[str] = set()
    for c in children(node):
        out |= free_vars(c, bound)
    return out


def uses_var(node, var: str) -> bool:
    return var in free_vars(node)
