"""Hard-logic entry points: satisfiability, entailment and numeric solution sets."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence, Union

from ..errors import InvariantViolation
from ..lang.ast import Atom, Compare, IntConst, Not
from ..lang.printer import to_text
from .dense import DENSE_LIMIT, DenseEngine
from .evaluate import evaluate
from .grounding import Grounding
from .search import DEFAULT_BUDGET, SearchEngine

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sat:
    model: Mapping[Atom, object]

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self) -> bool:
        return False


SatResult = Union[Sat, Unsat]


class Truth(str, Enum):
    TRUE = "True"
    FALSE = "False"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class SolverConfig:
    engine: str = "auto"  # auto | dense | search
    budget: int = DEFAULT_BUDGET
    gac_limit: int = 256
    dense_limit: int = DENSE_LIMIT
    domains: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    bound: int = 10**4


def make_engine(grounding: Grounding, config: SolverConfig | None = None):
    config = config or SolverConfig()
    kind = config.engine
    if kind == "auto":
        kind = "dense" if grounding.table.space_size() <= config.dense_limit else "search"
    if os.environ.get("SSR_DEBUG_GROUNDING"):
        log.debug("grounding:\n%s", dump_grounding(grounding))
    if kind == "dense":
        return DenseEngine(grounding)
    if kind == "search":
        return SearchEngine(grounding, budget=config.budget, gac_limit=config.gac_limit)
    raise ValueError(f"unknown engine {config.engine!r}")


def dump_grounding(grounding: Grounding) -> str:
    """Grounded constraints in surface syntax, one per line, for diffing."""
    lines = []
    for atom, dom in zip(grounding.table.atoms, grounding.table.domains):
        lines.append(f"# {to_text(atom)} in {list(dom)}")
    for c in grounding.constraints:
        lines.append(f"{':'.join(map(str, c.origin))}\t{to_text(c.formula)}")
    return "\n".join(lines)


def _included(engine, keep: Iterable[int] | None, extra: Sequence) -> list:
    g = engine.grounding
    facts = g.fact_constraints
    if keep is not None:
        wanted = set(keep)
        facts = [c for c in facts if c.origin[1] in wanted]
    return [c.formula for c in g.side_constraints] + [c.formula for c in facts] + list(extra)


def check_sat(engine, keep: Iterable[int] | None = None, extra: Sequence = ()) -> SatResult:
    """Satisfiability of side constraints, the kept facts and ``extra``.

    ``keep`` lists fact indices; None means every fact.  A Sat model is the
    least one in canonical order and is re-checked by evaluation.
    """
    keep = None if keep is None else list(keep)
    res = engine.check(keep, extra)
    if isinstance(res, Sat):
        for f in _included(engine, keep, extra):
            if not evaluate(res.model, f):
                raise InvariantViolation(f"model fails {to_text(f)}")
    return res


def assignment_formula(atom: Atom, value) -> object:
    """``a = v`` as a formula: the atom or its negation for Boolean atoms."""
    if isinstance(value, bool):
        return atom if value else Not(atom)
    return Compare("=", atom, IntConst(int(value)))


def entail_boolean(engine, q, keep: Iterable[int] | None = None) -> Truth:
    keep = None if keep is None else list(keep)
    pos = check_sat(engine, keep, [q])
    neg = check_sat(engine, keep, [Not(q)])
    if pos and not neg:
        return Truth.TRUE
    if neg and not pos:
        return Truth.FALSE
    if pos and neg:
        return Truth.UNKNOWN
    raise InvariantViolation("excluded middle: both q and not q are unsatisfiable")


def solve_numeric(engine, atom: Atom, keep: Iterable[int] | None = None) -> tuple[int, ...]:
    keep = None if keep is None else list(keep)
    dom = engine.grounding.table.domain(atom)
    return tuple(v for v in dom if check_sat(engine, keep, [assignment_formula(atom, v)]))
