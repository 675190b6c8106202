"""Targeted premise retrieval for ambiguous queries.

When several candidates survive, look for one atom assignment that leaves
exactly one of them satisfiable, replace it by stronger assignments that
entail it, and ask the gateway whether the final one holds.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import GatewayError, InvariantViolation
from .lang.ast import Atom, Not, atoms_of
from .lang.printer import to_text
from .solver import assignment_formula, check_sat

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Assignment:
    atom: Atom
    value: object

    @property
    def formula(self):
        return assignment_formula(self.atom, self.value)

    @property
    def negation(self):
        return Not(self.formula)

    def text(self) -> str:
        return to_text(self.formula)

    def to_json(self) -> dict:
        return {"atom": to_text(self.atom), "value": self.value}


@dataclass(frozen=True)
class Resolved:
    label: str
    assignment: Assignment
    chain: tuple[Assignment, ...]
    discriminators: tuple[tuple[Assignment, str], ...] = ()


@dataclass(frozen=True)
class Declined:
    reason: str
    chain: tuple[Assignment, ...] = ()
    discriminators: tuple[tuple[Assignment, str], ...] = ()

    label = None


RetrievalOutcome = Union[Resolved, Declined]


class _Probe:
    """Satisfiability probes over a fixed kept set, with a pool of known models."""

    def __init__(self, engine, kept: Sequence[int]) -> None:
        self.engine = engine
        self.kept = list(kept)
        self.models: list[dict] = []

    def sat(self, *extra) -> bool:
        res = check_sat(self.engine, self.kept, list(extra))
        if res:
            self.models.append(res.model)
        return bool(res)

    def witnessed(self, atom: Atom, value) -> bool:
        return any(m[atom] == value for m in self.models)

    def differs(self, atom: Atom, value) -> bool:
        return any(m[atom] != value for m in self.models)


def _components(engine, kept: Sequence[int]) -> dict[Atom, int]:
    """Connected components of atoms linked by a shared kept or side constraint."""
    g = engine.grounding
    parent = {a: a for a in g.table.atoms}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    wanted = set(kept)
    for c in g.constraints:
        if c.is_fact and c.origin[1] not in wanted:
            continue
        atoms = atoms_of(c.formula)
        for other in atoms[1:]:
            ra, rb = find(atoms[0]), find(other)
            if ra != rb:
                parent[rb] = ra
    roots: dict[Atom, int] = {}
    out = {}
    for a in g.table.atoms:
        out[a] = roots.setdefault(find(a), len(roots))
    return out


def find_discriminators(engine, kept: Sequence[int], candidates, flags=None) -> list[tuple[Assignment, str]]:
    """Assignments that leave exactly one candidate satisfiable, in canonical order.

    Assignments already entailed by the kept facts are skipped.  Atoms not
    connected to any candidate atom cannot change which candidates are
    satisfiable, so they are not probed.
    """
    probe = _Probe(engine, kept)
    if flags is None:
        flags = [probe.sat(c.formula) for c in candidates]
    live = [c for c, f in zip(candidates, flags) if f]
    comp = _components(engine, kept)
    relevant = {comp[a] for c in live for a in atoms_of(c.formula)}
    table = engine.grounding.table
    out: list[tuple[Assignment, str]] = []
    for atom, dom in zip(table.atoms, table.domains):
        if comp[atom] not in relevant:
            continue
        for value in dom:
            a = Assignment(atom, value)
            if not probe.differs(atom, value) and not probe.sat(a.negation):
                continue  # entailed already
            if not probe.witnessed(atom, value) and not probe.sat(a.formula):
                continue
            hits = [c for c in live if probe.sat(a.formula, c.formula)]
            if len(hits) == 1:
                out.append((a, hits[0].label))
    return out


def strengthen(engine, kept: Sequence[int], start: Assignment, label: str, candidates) -> tuple[Assignment, ...]:
    """Chain of ever stronger assignments beginning with ``start``.

    Each step picks the first assignment (canonical order) in the same
    component that entails the current one under the kept facts and still
    leaves ``label`` satisfiable.
    """
    probe = _Probe(engine, kept)
    comp = _components(engine, kept)
    target = next(c for c in candidates if c.label == label)
    table = engine.grounding.table
    chain = [start]
    visited = {start}
    current = start
    while True:
        nxt = None
        for atom, dom in zip(table.atoms, table.domains):
            if comp[atom] != comp[current.atom]:
                continue
            for value in dom:
                cand = Assignment(atom, value)
                if cand in visited:
                    continue
                if not probe.sat(cand.formula):
                    continue
                if probe.sat(cand.formula, current.negation):
                    continue
                if not probe.sat(cand.formula, current.formula):
                    continue
                if not probe.sat(cand.formula, target.formula):
                    continue
                nxt = cand
                break
            if nxt is not None:
                break
        if nxt is None:
            return tuple(chain)
        visited.add(nxt)
        chain.append(nxt)
        current = nxt


def resolve(engine, kept, candidates, flags, gateway, context: str, question: str) -> RetrievalOutcome:
    discs = find_discriminators(engine, kept, candidates, flags)
    if not discs:
        return Declined("no discriminator")
    first, label = discs[0]
    chain = strengthen(engine, kept, first, label, candidates)
    final = chain[-1]
    if gateway is None:
        return Declined("no gateway", chain, tuple(discs))
    try:
        confirmed = gateway.verify_premise(final.text(), context, question)
    except GatewayError as err:
        log.info("premise verification failed: %s", err)
        return Declined("gateway unavailable", chain, tuple(discs))
    if not confirmed:
        return Declined("premise denied", chain, tuple(discs))
    probe = _Probe(engine, kept)
    for c in candidates:
        if probe.sat(final.formula, c.formula) != (c.label == label):
            raise InvariantViolation(f"retrieved premise {final.text()} does not single out {label}")
    return Resolved(label, final, chain, tuple(discs))


def make_resolver(gateway, context: str, question: str):
    def resolver(engine, kept, candidates, flags):
        return resolve(engine, kept, candidates, flags, gateway, context, question)

    return resolver
