"""Syntax-level filter deciding whether a translation is solvable.

Malformed facts become the ``BoolVal(True)`` placeholder.  More than one
placeholder, or a malformed query, routes the problem to the CoT fallback.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .lang.ast import Exists, ForAll, Formula, boolean_atoms_of, uses_var, walk
from .lang.problem import FreeNumeric, Malformed, MalformedQuery, Problem, query_formulas
from .weighted import PLACEHOLDER, WeightedFact

# anything else in a logical form counts as garbled
_ALLOWED = re.compile(r"""[A-Za-z0-9_()., <>=!+*/&|^'"\-]*""")


@dataclass(frozen=True)
class SanitizedFactSet:
    facts: tuple[WeightedFact, ...]
    placeholder_count: int
    query_ok: bool
    replaced: tuple[tuple[int, str], ...] = ()


@dataclass(frozen=True)
class Proceed:
    facts: SanitizedFactSet


@dataclass(frozen=True)
class FallbackToCoT:
    reason: str


GateDecision = Union[Proceed, FallbackToCoT]


def _garbled(text: str) -> bool:
    return _ALLOWED.fullmatch(" ".join(text.split())) is None


def _vacuous_quantifier(formula: Formula) -> bool:
    return any(
        isinstance(sub, (ForAll, Exists)) and not uses_var(sub.body, sub.var) for sub in walk(formula)
    )


def fact_problem(problem: Problem, raw: str, formula) -> str | None:
    """Return why a fact must be replaced, or None if it is usable."""
    if isinstance(formula, Malformed):
        return "parse failure"
    if _garbled(raw):
        return "garbled characters"
    conflicts = set(problem.sort_conflicts)
    if conflicts and any(a.name in conflicts for a in boolean_atoms_of(formula)):
        return "invalid predicate usage"
    if _vacuous_quantifier(formula):
        # the bound variable never occurs: the translator dropped the subject
        return "invalid predicate usage"
    return None


def _query_ok(problem: Problem) -> bool:
    q = problem.query
    if isinstance(q, MalformedQuery):
        return False
    if isinstance(q, FreeNumeric):
        return q.atom.name not in problem.sort_conflicts
    conflicts = set(problem.sort_conflicts)
    for f in query_formulas(q):
        if _vacuous_quantifier(f):
            return False
        if conflicts and any(a.name in conflicts for a in boolean_atoms_of(f)):
            return False
    return True


def sanitize_facts(problem: Problem) -> SanitizedFactSet:
    facts: list[WeightedFact] = []
    replaced: list[tuple[int, str]] = []
    for fact in problem.facts:
        why = fact_problem(problem, fact.raw, fact.formula)
        if why is None:
            weight = 0.0 if fact.formula == PLACEHOLDER else 1.0
            facts.append(WeightedFact(fact.index, fact.sentence, fact.formula, weight))
        else:
            replaced.append((fact.index, why))
            facts.append(WeightedFact(fact.index, fact.sentence, PLACEHOLDER, 0.0))
    count = sum(1 for f in facts if f.is_placeholder)
    return SanitizedFactSet(tuple(facts), count, _query_ok(problem), tuple(replaced))


def sanitize(problem: Problem) -> GateDecision:
    sanitized = sanitize_facts(problem)
    if not sanitized.query_ok:
        return FallbackToCoT("query malformed")
    if sanitized.placeholder_count > 1:
        return FallbackToCoT(f"{sanitized.placeholder_count} placeholders")
    return Proceed(sanitized)


def as_problem(problem: Problem, sanitized: SanitizedFactSet) -> Problem:
    """Problem whose facts are the sanitized formulas (for idempotence checks)."""
    from .lang.problem import Fact
    from .lang.printer import to_text

    facts = [Fact(f.index, f.sentence, to_text(f.formula), f.formula) for f in sanitized.facts]
    return problem.with_facts(facts)
