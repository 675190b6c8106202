"""Quantifier expansion over the finite object universe."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..errors import DomainEmpty, SortConflict
from ..lang.ast import (
    FALSE,
    TRUE,
    And,
    Arith,
    Atom,
    BoolVal,
    Compare,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    IntConst,
    Not,
    Obj,
    Or,
    arith_ops_of,
    atoms_of,
    conj,
    disj,
    int_constants_of,
    substitute,
)
from ..lang.problem import POS, Fold, FreeNumeric, Problem, Schema, Sort, canonicalize_atom, infer_sorts, query_formulas

BOOL_DOMAIN = (False, True)


@dataclass(frozen=True)
class GroundConstraint:
    formula: Formula
    origin: tuple  # ("fact", index) or ("distinct", i, j)

    @property
    def is_fact(self) -> bool:
        return self.origin[0] == "fact"


@dataclass(frozen=True)
class GroundAtomTable:
    atoms: tuple[Atom, ...]
    domains: tuple[tuple, ...]
    sorts: tuple[Sort, ...]
    index: Mapping[Atom, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self) -> None:
        if not self.index:
            object.__setattr__(self, "index", {a: i for i, a in enumerate(self.atoms)})

    def __len__(self) -> int:
        return len(self.atoms)

    @property
    def boolean_atoms(self) -> list[Atom]:
        return [a for a, s in zip(self.atoms, self.sorts) if s == Sort.BOOLEAN]

    @property
    def numeric_atoms(self) -> list[tuple[Atom, tuple[int, ...]]]:
        return [(a, d) for a, d, s in zip(self.atoms, self.domains, self.sorts) if s == Sort.NUMERIC]

    def domain(self, atom: Atom) -> tuple:
        return self.domains[self.index[atom]]

    def sort(self, atom: Atom) -> Sort:
        return self.sorts[self.index[atom]]

    def space_size(self) -> int:
        size = 1
        for d in self.domains:
            size *= len(d)
        return size


@dataclass(frozen=True)
class Grounding:
    table: GroundAtomTable
    constraints: tuple[GroundConstraint, ...]
    query: tuple[Formula, ...]
    groups: tuple[tuple[Atom, ...], ...] = ()  # all-different groups
    folds: Mapping[str, Fold] = field(default_factory=dict, compare=False)

    @property
    def fact_constraints(self) -> list[GroundConstraint]:
        return [c for c in self.constraints if c.is_fact]

    @property
    def side_constraints(self) -> list[GroundConstraint]:
        return [c for c in self.constraints if not c.is_fact]


def ground_formula(formula: Formula, objects: Sequence[str], folds: dict[str, Fold] | None = None) -> Formula:
    """Expand quantifiers and fold atoms whose arguments became ground."""
    if isinstance(formula, ForAll):
        return conj([ground_formula(substitute(formula.body, formula.var, Obj(o)), objects, folds) for o in objects])
    if isinstance(formula, Exists):
        return disj([ground_formula(substitute(formula.body, formula.var, Obj(o)), objects, folds) for o in objects])
    if isinstance(formula, Atom):
        return canonicalize_atom(formula, folds)
    if isinstance(formula, (BoolVal, IntConst)):
        return formula
    if isinstance(formula, Not):
        return Not(ground_formula(formula.arg, objects, folds))
    if isinstance(formula, (And, Or)):
        return type(formula)(tuple(ground_formula(a, objects, folds) for a in formula.args))
    if isinstance(formula, (Implies, Iff, Compare, Arith)):
        lhs = ground_formula(formula.lhs, objects, folds)
        rhs = ground_formula(formula.rhs, objects, folds)
        if isinstance(formula, (Compare, Arith)):
            return type(formula)(formula.op, lhs, rhs)
        return type(formula)(lhs, rhs)
    raise TypeError(f"cannot ground {formula!r}")


def _apply(op: str, a: int, b: int) -> int | None:
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "//":
            return a // b
        if op == "/":
            return a // b if b and a % b == 0 else None
        if op == "**":
            return a**b if 0 <= b <= 8 else None
    except ZeroDivisionError:
        return None
    return None


def default_numeric_domain(formulas: Iterable[Formula], bound: int) -> tuple[int, ...]:
    """Constants in the problem plus one arithmetic step over them."""
    formulas = list(formulas)
    consts = sorted({c for f in formulas for c in int_constants_of(f)})
    ops = set()
    for f in formulas:
        ops |= arith_ops_of(f)
    values = set(consts)
    for op in sorted(ops):
        for a, b in itertools.product(consts, repeat=2):
            v = _apply(op, a, b)
            if v is not None:
                values.add(v)
    return tuple(sorted(v for v in values if -bound <= v <= bound))


def ground(
    problem: Problem,
    facts: Sequence,
    *,
    domains: Mapping[str, Iterable[int]] | None = None,
    bound: int = 10**4,
) -> Grounding:
    """Ground ``facts`` (weighted or plain formulas) for ``problem``.

    ``facts`` entries need ``index`` and ``formula`` attributes.
    ``domains`` overrides the numeric domain per canonical predicate name.
    """
    objects = list(problem.objects)
    folds = dict(problem.folds)
    constraints: list[GroundConstraint] = []
    for fact in facts:
        constraints.append(GroundConstraint(ground_formula(fact.formula, objects, folds), ("fact", fact.index)))
    query = tuple(ground_formula(q, objects, folds) for q in query_formulas(problem.query))

    order: dict[Atom, None] = {}
    for c in constraints:
        for a in atoms_of(c.formula):
            order.setdefault(a, None)
    for q in query:
        for a in atoms_of(q):
            order.setdefault(a, None)

    asked = [] if isinstance(problem.query, FreeNumeric) else list(query)
    sorts, conflicts = infer_sorts([c.formula for c in constraints] + asked)
    if isinstance(problem.query, FreeNumeric):
        name = query[0].name
        if sorts.get(name) == Sort.BOOLEAN:
            raise SortConflict(name)
        sorts[name] = Sort.NUMERIC
    if conflicts:
        raise SortConflict(conflicts[0])

    ordering = problem.schema == Schema.ORDERING
    groups: list[tuple[Atom, ...]] = []
    if ordering and (sorts.get(POS) == Sort.NUMERIC or POS not in sorts):
        pos_atoms = [Atom(POS, (Obj(o),)) for o in objects]
        for a in pos_atoms:
            order.setdefault(a, None)
        sorts[POS] = Sort.NUMERIC
        for (i, a), (j, b) in itertools.combinations(enumerate(pos_atoms), 2):
            constraints.append(GroundConstraint(Compare("!=", a, b), ("distinct", i, j)))
        if len(pos_atoms) > 1:
            groups.append(tuple(pos_atoms))

    overrides = {k: tuple(sorted(set(v))) for k, v in (domains or {}).items()}
    generic: tuple[int, ...] | None = None
    atoms = list(order)
    doms: list[tuple] = []
    atom_sorts: list[Sort] = []
    for a in atoms:
        sort = sorts.get(a.name, Sort.BOOLEAN)
        atom_sorts.append(sort)
        if sort == Sort.BOOLEAN:
            doms.append(BOOL_DOMAIN)
            continue
        if a.name in overrides:
            dom = overrides[a.name]
        elif a.name == POS and ordering:
            dom = tuple(range(1, len(objects) + 1))
        else:
            if generic is None:
                generic = default_numeric_domain([c.formula for c in constraints] + list(query), bound)
            dom = generic
        if not dom:
            raise DomainEmpty(f"numeric atom {a.name} has an empty domain")
        doms.append(dom)

    table = GroundAtomTable(tuple(atoms), tuple(doms), tuple(atom_sorts))
    return Grounding(table, tuple(constraints), query, tuple(groups), folds)


__all__ = [
    "BOOL_DOMAIN",
    "FALSE",
    "TRUE",
    "GroundAtomTable",
    "GroundConstraint",
    "Grounding",
    "default_numeric_domain",
    "ground",
    "ground_formula",
]
