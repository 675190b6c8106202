"""Literals, rules, steps and chains."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..lang.ast import Atom, Compare, IntConst, Not
from ..lang.printer import to_text


@dataclass(frozen=True)
class Literal:
    """A signed ground fact about one atom.

    Boolean atoms: ``value`` is the truth value and ``positive`` is always
    True.  Numeric atoms: ``positive`` selects binding (``a = v``) or
    exclusion (``a != v``).
    """

    atom: Atom
    value: object
    positive: bool = True

    @property
    def boolean(self) -> bool:
        return isinstance(self.value, bool)

    @property
    def is_binding(self) -> bool:
        return not self.boolean and self.positive

    @property
    def is_exclusion(self) -> bool:
        return not self.boolean and not self.positive

    def negate(self) -> "Literal":
        if self.boolean:
            return Literal(self.atom, not self.value)
        return Literal(self.atom, self.value, not self.positive)

    @property
    def formula(self):
        if self.boolean:
            return self.atom if self.value else Not(self.atom)
        return Compare("=" if self.positive else "!=", self.atom, IntConst(int(self.value)))

    def status(self, dom) -> Optional[bool]:
        """Truth under a domain of remaining values (None if open)."""
        if self.positive:
            if self.value not in dom:
                return False
            return True if len(dom) == 1 else None
        if self.value not in dom:
            return True
        return False if len(dom) == 1 else None

    def restrict(self, dom: tuple) -> tuple:
        if self.positive:
            return tuple(v for v in dom if v == self.value and type(v) is type(self.value))
        return tuple(v for v in dom if not (v == self.value and type(v) is type(self.value)))

    def text(self) -> str:
        return to_text(self.formula)

    def __str__(self) -> str:
        return self.text()


@dataclass(frozen=True)
class Rule:
    premises: tuple[Literal, ...]
    conclusions: tuple[Literal, ...]
    origin: int

    @property
    def horn(self) -> bool:
        return len(self.conclusions) == 1

    def text(self) -> str:
        lhs = " and ".join(p.text() for p in self.premises)
        rhs = " or ".join(c.text() for c in self.conclusions) or "False"
        return f"{lhs} -> {rhs}" if lhs else rhs


@dataclass(frozen=True)
class Residual:
    """A constraint kept whole (comparisons between atoms, arithmetic, distinctness)."""

    formula: object
    origin: tuple
    atoms: tuple[Atom, ...]


@dataclass(frozen=True)
class Theory:
    properties: tuple[Literal, ...]
    rules: tuple[Rule, ...]
    residual: tuple[Residual, ...]
    groups: tuple[tuple[Atom, ...], ...]
    domains: dict = field(default_factory=dict, compare=False)  # Atom -> tuple of values
    assumptions: tuple[Literal, ...] = ()


VIA_KINDS = ("given", "assumption", "rule", "elimination", "constraint", "permutation")


@dataclass(frozen=True)
class Step:
    derived: Literal
    via: str
    ref: Optional[int] = None  # rule, residual or group index
    supports: tuple[Literal, ...] = ()


@dataclass(frozen=True)
class Node:
    literal: Optional[Literal]
    via: str
    children: tuple["Node", ...] = ()


@dataclass(frozen=True)
class Chain:
    direction: str  # forward | backward
    steps: tuple[Step, ...]
    answer: str  # True / False, an option label, or a numeric value
    supports: tuple[Literal, ...]
    tree: Node

    @property
    def tags(self) -> tuple[str, ...]:
        """Multiset of step kinds, used to group chains by reasoning pattern."""
        return tuple(sorted(s.via for s in self.steps))


@dataclass(frozen=True)
class NoChain:
    direction: str
    reason: str  # fixpoint | cycle | depth | dead-end | conflict | unsupported


ChainResult = Union[Chain, NoChain]


def build_tree(steps, supports, answer: str) -> Node:
    by_lit = {s.derived: s for s in steps}

    def node(lit: Literal) -> Node:
        s = by_lit[lit]
        return Node(lit, s.via, tuple(node(x) for x in s.supports))

    return Node(None, f"answer:{answer}", tuple(node(x) for x in supports))
