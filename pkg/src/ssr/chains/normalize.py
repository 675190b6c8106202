"""Clause normalisation of grounded constraints into properties, rules and residuals."""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from ..lang.ast import And, Atom, BoolVal, Compare, Iff, Implies, Not, Or, atoms_of
from ..solver.evaluate import evaluate
from ..solver.grounding import Grounding
from .model import Literal, Residual, Rule, Theory

CLAUSE_CAP = 64


class NotClausal(Exception):
    pass


# NNF over literals: Literal | bool | ("and", items) | ("or", items)


def _compare_node(f: Compare, neg: bool, domains):
    atoms = list(dict.fromkeys(atoms_of(f)))
    if len(atoms) > 1:
        raise NotClausal
    if not atoms:
        return evaluate({}, f) != neg
    a = atoms[0]
    dom = domains[a]
    allowed = [v for v in dom if evaluate({a: v}, f) != neg]
    if len(allowed) == len(dom):
        return True
    if not allowed:
        return False
    if len(allowed) == 1:
        return Literal(a, allowed[0], True)
    excluded = [Literal(a, v, False) for v in dom if v not in allowed]
    return excluded[0] if len(excluded) == 1 else ("and", excluded)


def nnf(f, domains, neg: bool = False):
    if isinstance(f, Atom):
        return Literal(f, not neg)
    if isinstance(f, BoolVal):
        return f.value != neg
    if isinstance(f, Not):
        return nnf(f.arg, domains, not neg)
    if isinstance(f, (And, Or)):
        kind = "and" if isinstance(f, And) != neg else "or"
        return (kind, [nnf(a, domains, neg) for a in f.args])
    if isinstance(f, Implies):
        return nnf(Or((Not(f.lhs), f.rhs)), domains, neg)
    if isinstance(f, Iff):
        a, b = f.lhs, f.rhs
        if neg:
            return ("or", [("and", [nnf(a, domains), nnf(b, domains, True)]), ("and", [nnf(a, domains, True), nnf(b, domains)])])
        return ("or", [("and", [nnf(a, domains), nnf(b, domains)]), ("and", [nnf(a, domains, True), nnf(b, domains, True)])])
    if isinstance(f, Compare):
        return _compare_node(f, neg, domains)
    raise NotClausal


def _tidy(lits: Iterable[Literal]) -> tuple[Literal, ...] | None:
    """Deduplicate; None when the clause/term contains a literal and its negation."""
    out = tuple(dict.fromkeys(lits))
    seen = set(out)
    if any(l.negate() in seen for l in out):
        return None
    return out


def _normal(node, outer: str) -> list[tuple[Literal, ...]]:
    """CNF (outer='and') or DNF (outer='or') as a list of literal tuples."""
    inner = "or" if outer == "and" else "and"
    if isinstance(node, Literal):
        return [(node,)]
    if node is True:
        return [] if outer == "and" else [()]
    if node is False:
        return [()] if outer == "and" else []
    kind, items = node
    parts = [_normal(x, outer) for x in items]
    if kind == outer:
        groups = [g for p in parts for g in p]
    else:
        size = 1
        for p in parts:
            size *= max(len(p), 1)
        if size > CLAUSE_CAP:
            raise NotClausal
        groups = [tuple(l for g in combo for l in g) for combo in itertools.product(*parts)]
    out: list[tuple[Literal, ...]] = []
    for g in groups:
        t = _tidy(g)
        if t is None:
            continue  # tautological clause / contradictory term
        if t not in out:
            out.append(t)
    if len(out) > CLAUSE_CAP:
        raise NotClausal
    return out


def cnf(node):
    return _normal(node, "and")


def dnf(node):
    return _normal(node, "or")


def _clauses_to_theory(clauses, origin: int, props: list, rules: list) -> None:
    for c in clauses:
        if len(c) == 1:
            props.append(c[0])
        elif c:
            rules.append(Rule((), c, origin))


def normalize_formula(f, origin: int, domains) -> tuple[list[Literal], list[Rule]]:
    """Properties and rules for one fact; raises NotClausal for residual material."""
    props: list[Literal] = []
    rules: list[Rule] = []
    if isinstance(f, And):
        for part in f.args:
            p, r = normalize_formula(part, origin, domains)
            props += p
            rules += r
        return props, rules
    if isinstance(f, Iff):
        for g in (Implies(f.lhs, f.rhs), Implies(f.rhs, f.lhs)):
            p, r = normalize_formula(g, origin, domains)
            props += p
            rules += r
        return props, rules
    if isinstance(f, Implies):
        terms = dnf(nnf(f.lhs, domains))
        clauses = cnf(nnf(f.rhs, domains))
        for t in terms:
            for c in clauses:
                if not t:
                    _clauses_to_theory([c], origin, props, rules)
                elif not c:
                    # premises jointly impossible
                    rules.append(Rule((), tuple(l.negate() for l in t), origin))
                else:
                    rules.append(Rule(t, c, origin))
        return props, rules
    _clauses_to_theory(cnf(nnf(f, domains)), origin, props, rules)
    return props, rules


def normalize(grounding: Grounding, keep: Sequence[int] | None = None, assumptions: Sequence[Literal] = ()) -> Theory:
    """Split the kept fact constraints (plus side constraints) into clause material."""
    table = grounding.table
    domains = {a: tuple(d) for a, d in zip(table.atoms, table.domains)}
    wanted = None if keep is None else set(keep)
    props: list[Literal] = []
    rules: list[Rule] = []
    residual: list[Residual] = []
    for c in grounding.constraints:
        if c.is_fact and wanted is not None and c.origin[1] not in wanted:
            continue
        if c.is_fact:
            try:
                p, r = normalize_formula(c.formula, c.origin[1], domains)
            except NotClausal:
                pass
            else:
                props += p
                rules += r
                continue
        residual.append(Residual(c.formula, c.origin, tuple(dict.fromkeys(atoms_of(c.formula)))))
    return Theory(
        tuple(dict.fromkeys(props)),
        tuple(rules),
        tuple(residual),
        tuple(grounding.groups),
        domains,
        tuple(assumptions),
    )
