"""Three-valued evaluation over shrinking domains, shared by the chain generators."""

from __future__ import annotations

import itertools
from typing import Mapping, Optional

from ..lang.ast import And, Atom, BoolVal, Compare, Iff, Implies, Not, Or, atoms_of
from ..lang.problem import BooleanQuery, CandidateMap, FreeNumeric
from ..solver.evaluate import evaluate
from .model import Literal

ENUM_LIMIT = 4096


def kleene(f, domains: Mapping[Atom, tuple]) -> Optional[bool]:
    if isinstance(f, Atom):
        dom = domains[f]
        return dom[0] if len(dom) == 1 else None
    if isinstance(f, BoolVal):
        return f.value
    if isinstance(f, Not):
        v = kleene(f.arg, domains)
        return None if v is None else not v
    if isinstance(f, And):
        vals = [kleene(a, domains) for a in f.args]
        if False in vals:
            return False
        return True if all(v is True for v in vals) else None
    if isinstance(f, Or):
        vals = [kleene(a, domains) for a in f.args]
        if True in vals:
            return True
        return False if all(v is False for v in vals) else None
    if isinstance(f, Implies):
        return kleene(Or((Not(f.lhs), f.rhs)), domains)
    if isinstance(f, Iff):
        a, b = kleene(f.lhs, domains), kleene(f.rhs, domains)
        return None if a is None or b is None else a == b
    if isinstance(f, Compare):
        atoms = list(dict.fromkeys(atoms_of(f)))
        doms = [domains[a] for a in atoms]
        size = 1
        for d in doms:
            size *= len(d)
        if size > ENUM_LIMIT:
            return None
        seen = {evaluate(dict(zip(atoms, combo)), f) for combo in itertools.product(*doms)}
        return seen.pop() if len(seen) == 1 else None
    raise TypeError(f"cannot evaluate {f!r}")


def query_targets(problem, grounding) -> list[tuple[str, object]]:
    """(answer, formula) pairs; the chain proves one of them."""
    q = problem.query
    if isinstance(q, BooleanQuery):
        f = grounding.query[0]
        return [("True", f), ("False", Not(f))]
    if isinstance(q, CandidateMap):
        return list(zip(q.labels, grounding.query))
    if isinstance(q, FreeNumeric):
        atom = grounding.query[0]
        return [(str(v), Literal(atom, v).formula) for v in grounding.table.domain(atom)]
    return []


def query_as_rule(target_formula) -> tuple[list[Literal], object]:
    """Split ``P -> Q``: the literals of P become assumptions, Q the new target."""
    if isinstance(target_formula, Implies):
        parts = target_formula.lhs.args if isinstance(target_formula.lhs, And) else (target_formula.lhs,)
        lits = []
        for p in parts:
            if isinstance(p, Atom):
                lits.append(Literal(p, True))
            elif isinstance(p, Not) and isinstance(p.arg, Atom):
                lits.append(Literal(p.arg, False))
            else:
                return [], target_formula
        return lits, target_formula.rhs
    return [], target_formula
