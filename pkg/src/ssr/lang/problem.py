"""Translator envelopes: objects, facts and the query, plus sort inference."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Union

from ..errors import ParseError, SortConflict
from .ast import (
    Atom,
    BoolVal,
    Formula,
    Obj,
    Var,
    boolean_atoms_of,
    map_atoms,
    numeric_atoms_of,
)
from .parser import parse_formula

POS = "Pos"
OPTION_LABELS = "ABCDEFGHIJ"


class Sort(str, Enum):
    BOOLEAN = "boolean"
    NUMERIC = "numeric"


class Schema(str, Enum):
    DEDUCTION = "deduction"
    ORDERING = "ordering"


@dataclass(frozen=True)
class Fold:
    """Record of a name-mangled multi-argument atom, kept for rendering."""

    base: str
    folded: tuple[str, ...]


def canonicalize_atom(atom: Atom, folds: dict[str, Fold] | None = None) -> Atom:
    """Fold trailing ground arguments into the predicate name.

    ``Eats(bear, tiger)`` becomes ``Eats_tiger(bear)``.  Trailing arguments
    that are still variables are left alone; grounding folds them after
    substitution.
    """
    if len(atom.args) <= 1:
        return atom
    tail = atom.args[1:]
    if any(isinstance(a, Var) for a in tail):
        return atom
    name = "_".join([atom.name, *(a.name for a in tail)])
    if folds is not None:
        folds.setdefault(name, Fold(atom.name, tuple(a.name for a in tail)))
    return Atom(name, atom.args[:1])


def canonicalize(formula, folds: dict[str, Fold] | None = None):
    return map_atoms(formula, lambda a: canonicalize_atom(a, folds))


@dataclass(frozen=True)
class Malformed:
    """Marker for a logical form that failed to parse."""

    raw: str
    reason: str
    position: int = 0


@dataclass(frozen=True)
class Fact:
    index: int
    sentence: str
    raw: str
    formula: Union[Formula, Malformed]

    @property
    def ok(self) -> bool:
        return not isinstance(self.formula, Malformed)


@dataclass(frozen=True)
class BooleanQuery:
    formula: Formula


@dataclass(frozen=True)
class CandidateMap:
    options: tuple[tuple[str, Formula], ...]

    def __post_init__(self) -> None:
        labels = [lab for lab, _ in self.options]
        if len(labels) < 2 or len(set(labels)) != len(labels):
            raise ValueError("CandidateMap needs at least two distinct labels")

    @property
    def labels(self) -> list[str]:
        return [lab for lab, _ in self.options]


@dataclass(frozen=True)
class FreeNumeric:
    atom: Atom


@dataclass(frozen=True)
class MalformedQuery:
    raw: Any
    reason: str


QuerySpec = Union[BooleanQuery, CandidateMap, FreeNumeric]


def query_formulas(query) -> list[Formula]:
    if isinstance(query, BooleanQuery):
        return [query.formula]
    if isinstance(query, CandidateMap):
        return [f for _, f in query.options]
    if isinstance(query, FreeNumeric):
        return [query.atom]
    return []


@dataclass(frozen=True)
class Problem:
    objects: tuple[str, ...]
    facts: tuple[Fact, ...]
    query: Union[QuerySpec, MalformedQuery]
    schema: Schema
    larger_direction: str | None = None
    sorts: Mapping[str, Sort] = field(default_factory=dict)
    sort_conflicts: tuple[str, ...] = ()
    folds: Mapping[str, Fold] = field(default_factory=dict)

    def formulas(self) -> list[Formula]:
        return [f.formula for f in self.facts if f.ok]

    def sort_of(self, name: str) -> Sort:
        return self.sorts.get(name, Sort.BOOLEAN)

    def with_facts(self, facts) -> "Problem":
        return replace(self, facts=tuple(facts))

    def to_document(self) -> dict:
        """Inverse of :func:`parse_problem` up to canonical spelling."""
        from .printer import to_text

        doc: dict[str, Any] = {"objects": list(self.objects)}
        if self.larger_direction is not None:
            doc["larger_direction"] = self.larger_direction
        doc["facts"] = [
            [f.sentence, f.raw if not f.ok else to_text(f.formula)] for f in self.facts
        ]
        q = self.query
        if isinstance(q, BooleanQuery):
            doc["query"] = to_text(q.formula)
        elif isinstance(q, CandidateMap):
            doc["query"] = {lab: to_text(f) for lab, f in q.options}
        elif isinstance(q, FreeNumeric):
            doc["query"] = to_text(q.atom)
        else:
            doc["query"] = q.raw
        return doc


def _clean_name(name: Any) -> str:
    if not isinstance(name, str):
        raise ParseError(0, f"object name must be a string, got {type(name).__name__}")
    cleaned = "_".join(name.split())
    if not cleaned:
        raise ParseError(0, "empty object name")
    return cleaned


def _parse_form(raw: str, folds: dict[str, Fold]) -> Formula:
    return canonicalize(parse_formula(raw), folds)


def infer_sorts(formulas: list[Formula]) -> tuple[dict[str, Sort], list[str]]:
    """Numeric iff the name occurs under a comparison anywhere."""
    numeric: dict[str, None] = {}
    boolean: dict[str, None] = {}
    for f in formulas:
        for a in numeric_atoms_of(f):
            numeric.setdefault(a.name, None)
        for a in boolean_atoms_of(f):
            boolean.setdefault(a.name, None)
    sorts = {name: Sort.BOOLEAN for name in boolean}
    sorts.update({name: Sort.NUMERIC for name in numeric})
    conflicts = [name for name in boolean if name in numeric]
    return sorts, conflicts


def check_sorts(formulas: list[Formula]) -> dict[str, Sort]:
    """Strict variant of :func:`infer_sorts` raising :class:`SortConflict`."""
    sorts, conflicts = infer_sorts(formulas)
    if conflicts:
        raise SortConflict(conflicts[0])
    return sorts


def _parse_query(raw: Any, folds: dict[str, Fold]):
    try:
        if isinstance(raw, list):
            if len(raw) == 1:
                raw = raw[0]
            else:
                raw = {OPTION_LABELS[i]: item for i, item in enumerate(raw)}
        if isinstance(raw, str):
            f = _parse_form(raw, folds)
            if f == BoolVal(True):
                return MalformedQuery(raw, "query is a placeholder")
            return BooleanQuery(f)
        if isinstance(raw, dict):
            if len(raw) < 2:
                return MalformedQuery(raw, "option map needs at least two entries")
            opts = []
            for label, text in raw.items():
                if not isinstance(text, str):
                    return MalformedQuery(raw, f"option {label} is not a string")
                opts.append((str(label), _parse_form(text, folds)))
            return CandidateMap(tuple(opts))
    except ParseError as err:
        return MalformedQuery(raw, err.reason)
    return MalformedQuery(raw, f"unsupported query type {type(raw).__name__}")


def parse_problem(document: Mapping[str, Any] | str) -> Problem:
    """Build a :class:`Problem` from a translator envelope.

    Bad facts are kept as :class:`Malformed`; only a broken envelope or a
    missing query raises :class:`ParseError`.
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as err:
            raise ParseError(0, f"envelope is not JSON: {err.msg}") from None
    if not isinstance(document, Mapping):
        raise ParseError(0, "envelope must be an object")
    if "query" not in document:
        raise ParseError(0, "envelope has no query")
    raw_objects = document.get("objects", [])
    raw_facts = document.get("facts", [])
    if not isinstance(raw_objects, list) or not isinstance(raw_facts, list):
        raise ParseError(0, "objects and facts must be arrays")

    objects: dict[str, None] = {}
    for name in raw_objects:
        objects.setdefault(_clean_name(name), None)

    folds: dict[str, Fold] = {}
    facts: list[Fact] = []
    for i, entry in enumerate(raw_facts):
        if isinstance(entry, str):
            sentence, raw = "", entry
        elif isinstance(entry, list) and len(entry) == 2 and all(isinstance(x, str) for x in entry):
            sentence, raw = entry
        else:
            raise ParseError(0, f"fact {i} must be a string or a [sentence, form] pair")
        try:
            formula: Formula | Malformed = _parse_form(raw, folds)
        except ParseError as err:
            formula = Malformed(raw, err.reason, err.position)
        facts.append(Fact(i, sentence, raw, formula))

    query = _parse_query(document["query"], folds)
    parsed = [f.formula for f in facts if f.ok]
    if isinstance(query, BooleanQuery) and isinstance(query.formula, Atom):
        # a bare atom that the facts use numerically asks for its value
        fact_sorts, _ = infer_sorts(parsed)
        if fact_sorts.get(query.formula.name) == Sort.NUMERIC:
            query = FreeNumeric(query.formula)
    asked = [] if isinstance(query, FreeNumeric) else query_formulas(query)
    sorts, conflicts = infer_sorts(parsed + asked)

    larger = document.get("larger_direction")
    if larger is not None and not isinstance(larger, str):
        raise ParseError(0, "larger_direction must be a string")
    has_pos = any(name == POS and s == Sort.NUMERIC for name, s in sorts.items())
    schema = Schema.ORDERING if (larger is not None or has_pos) else Schema.DEDUCTION
    return Problem(
        objects=tuple(objects),
        facts=tuple(facts),
        query=query,
        schema=schema,
        larger_direction=larger,
        sorts=sorts,
        sort_conflicts=tuple(conflicts),
        folds=folds,
    )


__all__ = [
    "POS",
    "BooleanQuery",
    "CandidateMap",
    "Fact",
    "Fold",
    "FreeNumeric",
    "Malformed",
    "MalformedQuery",
    "Obj",
    "Problem",
    "Schema",
    "Sort",
    "canonicalize",
    "canonicalize_atom",
    "check_sorts",
    "infer_sorts",
    "parse_problem",
    "query_formulas",
]
