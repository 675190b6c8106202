"""Soft-logic relaxation: weighted consistency restoration and candidate selection.

When the facts are inconsistent the solver keeps the satisfiable subset of
largest total weight.  Candidates are then tested one by one: a unique
satisfiable candidate is the answer (case I); if none is satisfiable each
candidate gets its own best subset and the heaviest wins (case II); if
several are satisfiable the retrieval step decides (case III).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence, Union

from .errors import BudgetExceeded, SideUnsat, SortConflict, DomainEmpty
from .lang.ast import Atom, Not
from .lang.problem import BooleanQuery, CandidateMap, FreeNumeric, Problem
from .sanitizer import SanitizedFactSet
from .solver import SolverConfig, Truth, assignment_formula, check_sat, entail_boolean, ground, make_engine
from .solver.dense import DenseEngine
from .weighted import WeightedFact, entropy_weight

TOL = 1e-9
SUBSET_BUDGET = 200_000


@dataclass(frozen=True)
class BooleanVerdict:
    value: Truth

    def to_json(self) -> dict:
        return {"kind": "boolean", "value": self.value.value}


@dataclass(frozen=True)
class OptionVerdict:
    label: str

    def to_json(self) -> dict:
        return {"kind": "option", "label": self.label}


@dataclass(frozen=True)
class ValueSetVerdict:
    values: tuple[int, ...]

    def to_json(self) -> dict:
        return {"kind": "values", "values": list(self.values)}


@dataclass(frozen=True)
class FallbackVerdict:
    reason: str

    def to_json(self) -> dict:
        return {"kind": "fallback", "reason": self.reason}


Verdict = Union[BooleanVerdict, OptionVerdict, ValueSetVerdict, FallbackVerdict]


def verdict_from_json(doc: Mapping) -> Verdict:
    kind = doc["kind"]
    if kind == "boolean":
        return BooleanVerdict(Truth(doc["value"]))
    if kind == "option":
        return OptionVerdict(doc["label"])
    if kind == "values":
        return ValueSetVerdict(tuple(doc["values"]))
    if kind == "fallback":
        return FallbackVerdict(doc["reason"])
    raise ValueError(f"unknown verdict kind {kind!r}")


def verdict_text(v: Verdict) -> str:
    if isinstance(v, BooleanVerdict):
        return v.value.value
    if isinstance(v, OptionVerdict):
        return v.label
    if isinstance(v, ValueSetVerdict):
        return "{" + ", ".join(map(str, v.values)) + "}"
    return f"Fallback({v.reason})"


@dataclass(frozen=True)
class Candidate:
    label: str
    formula: object
    value: object = None  # the domain value for numeric candidates


@dataclass(frozen=True)
class SubsetResult:
    kept: frozenset[int]
    dropped: frozenset[int]
    total_weight: float


def apply_weights(facts: Sequence[WeightedFact], traces: Mapping[int, Sequence] | None, *, uniform: bool = False) -> list[WeightedFact]:
    """Entropy-derived weights from per-fact token traces.

    Facts without a trace, or every fact when ``traces`` is None, fall back
    to weight 1.  Placeholders stay at 0.
    """
    out = []
    for f in facts:
        if f.is_placeholder:
            out.append(f.with_weight(0.0))
        elif uniform or not traces or not traces.get(f.index):
            out.append(f.with_weight(1.0))
        else:
            out.append(f.with_weight(entropy_weight(traces[f.index])))
    return out


def _indicator(dropped, order: Sequence[int]) -> tuple[int, ...]:
    return tuple(1 if i in dropped else 0 for i in order)


def max_weight_sat_subset(
    engine,
    facts: Sequence[WeightedFact],
    extra: Sequence = (),
    *,
    method: str = "auto",
    tol: float = TOL,
    budget: int = SUBSET_BUDGET,
) -> SubsetResult:
    """Heaviest subset of ``facts`` consistent with the side constraints and ``extra``.

    Ties go to the larger subset, then to the dropped set whose indicator
    vector (in fact order) is lexicographically smallest.  ``method`` is
    ``auto``, ``dense`` (vectorised scan) or ``search`` (best-first over
    drop-sets guided by unsatisfiable cores).
    """
    order = [f.index for f in facts]
    weight = {f.index: f.weight for f in facts}
    everything = frozenset(order)
    if not check_sat(engine, [], extra):
        raise SideUnsat("side constraints are unsatisfiable on their own")
    if check_sat(engine, order, extra):
        return SubsetResult(everything, frozenset(), float(sum(weight.values())))

    if method == "auto":
        method = "dense" if isinstance(engine, DenseEngine) else "search"
    if method == "dense":
        if not isinstance(engine, DenseEngine):
            raise ValueError("the dense method needs a dense engine")
        kept = engine.best_subset(order, [weight[i] for i in order], extra, tol)
        kept_set = frozenset(kept)
    elif method == "search":
        kept_set = _best_first(engine, order, weight, extra, tol, budget)
    else:
        raise ValueError(f"unknown method {method!r}")
    dropped = everything - kept_set
    return SubsetResult(kept_set, dropped, float(sum(weight[i] for i in order if i in kept_set)))


def _best_first(engine, order, weight, extra, tol, budget) -> frozenset[int]:
    everything = frozenset(order)
    cores: list[frozenset[int]] = []

    def core_of(kept: frozenset[int]) -> frozenset[int] | None:
        for c in cores:
            if c <= kept:
                return c
        if check_sat(engine, [i for i in order if i in kept], extra):
            return None
        core = [i for i in order if i in kept]
        for i in list(core):
            trial = [j for j in core if j != i]
            if not check_sat(engine, trial, extra):
                core = trial
        found = frozenset(core)
        cores.append(found)
        return found

    start: frozenset[int] = frozenset()
    heap = [(0.0, 0, _indicator(start, order), start)]
    seen = {start}
    best_w: float | None = None
    winners: list[tuple[int, tuple, frozenset[int]]] = []
    pops = 0
    while heap:
        w, n, key, dropped = heapq.heappop(heap)
        if best_w is not None and w > best_w + tol:
            break
        pops += 1
        if pops > budget:
            raise BudgetExceeded(f"subset search exceeded {budget} nodes")
        core = core_of(everything - dropped)
        if core is None:
            if best_w is None:
                best_w = w
            winners.append((n, key, dropped))
            continue
        for j in order:
            if j in core:
                child = dropped | {j}
                if child not in seen:
                    seen.add(child)
                    heapq.heappush(heap, (w + weight[j], n + 1, _indicator(child, order), child))
    if not winners:
        raise SideUnsat("no subset is satisfiable")
    winners.sort(key=lambda t: (t[0], t[1]))
    return everything - winners[0][2]


@dataclass
class SoftReport:
    verdict: Verdict
    case: str  # I, II, III or fallback
    candidates: tuple[Candidate, ...] = ()
    sat_flags: tuple[bool, ...] = ()
    restored: bool = False
    kept: tuple[int, ...] = ()
    dropped: tuple[int, ...] = ()
    candidate_weights: tuple[float | None, ...] = ()
    retrieval: object = None
    engine: object = field(default=None, repr=False)
    grounding: object = field(default=None, repr=False)


def candidates_for(problem: Problem, grounding) -> list[Candidate]:
    q = problem.query
    if isinstance(q, BooleanQuery):
        f = grounding.query[0]
        return [Candidate(Truth.TRUE.value, f), Candidate(Truth.FALSE.value, Not(f))]
    if isinstance(q, CandidateMap):
        return [Candidate(lab, f) for lab, f in zip(q.labels, grounding.query)]
    if isinstance(q, FreeNumeric):
        atom: Atom = grounding.query[0]
        return [Candidate(str(v), assignment_formula(atom, v), v) for v in grounding.table.domain(atom)]
    raise ValueError("query is not solvable")


def verdict_for(problem: Problem, cand: Candidate) -> Verdict:
    if isinstance(problem.query, BooleanQuery):
        return BooleanVerdict(Truth(cand.label))
    if isinstance(problem.query, CandidateMap):
        return OptionVerdict(cand.label)
    return ValueSetVerdict((cand.value,))


def _ambiguous(problem: Problem, cands: Sequence[Candidate]) -> Verdict:
    if isinstance(problem.query, BooleanQuery):
        return BooleanVerdict(Truth.UNKNOWN)
    if isinstance(problem.query, FreeNumeric):
        return ValueSetVerdict(tuple(sorted(c.value for c in cands)))
    return FallbackVerdict("ambiguous options")


Resolver = Callable[..., object]


def prepare(problem: Problem, facts: Sequence[WeightedFact], config: SolverConfig | None = None):
    config = config or SolverConfig()
    grounding = ground(problem, facts, domains=config.domains, bound=config.bound)
    return grounding, make_engine(grounding, config)


def soft_solve(
    problem: Problem,
    sanitized: SanitizedFactSet | Sequence[WeightedFact],
    *,
    config: SolverConfig | None = None,
    resolver: Resolver | None = None,
) -> SoftReport:
    facts = list(sanitized.facts if isinstance(sanitized, SanitizedFactSet) else sanitized)
    try:
        grounding, engine = prepare(problem, facts, config)
        return _soft(problem, facts, grounding, engine, resolver)
    except BudgetExceeded:
        return SoftReport(FallbackVerdict("budget exceeded"), "fallback")
    except (SortConflict, DomainEmpty) as err:
        return SoftReport(FallbackVerdict(str(err)), "fallback")


def _soft(problem, facts, grounding, engine, resolver) -> SoftReport:
    cands = candidates_for(problem, grounding)
    if not check_sat(engine, []):
        return SoftReport(FallbackVerdict("side constraints unsatisfiable"), "fallback", tuple(cands), engine=engine, grounding=grounding)
    order = [f.index for f in facts]
    restored = False
    kept = list(order)
    dropped: list[int] = []
    if not check_sat(engine, order):
        sub = max_weight_sat_subset(engine, facts)
        kept = [i for i in order if i in sub.kept]
        dropped = [i for i in order if i in sub.dropped]
        restored = True
    flags = tuple(bool(check_sat(engine, kept, [c.formula])) for c in cands)
    base = dict(
        candidates=tuple(cands),
        sat_flags=flags,
        restored=restored,
        kept=tuple(kept),
        dropped=tuple(dropped),
        engine=engine,
        grounding=grounding,
    )
    n_sat = sum(flags)
    if n_sat == 1:
        return SoftReport(verdict_for(problem, cands[flags.index(True)]), "I", **base)
    if n_sat == 0:
        kept_facts = [f for f in facts if f.index in set(kept)]
        weights: list[float | None] = []
        for c in cands:
            try:
                weights.append(max_weight_sat_subset(engine, kept_facts, [c.formula]).total_weight)
            except SideUnsat:
                weights.append(None)
        live = [w for w in weights if w is not None]
        if not live:
            return SoftReport(FallbackVerdict("no candidate satisfiable"), "II", candidate_weights=tuple(weights), **base)
        top = max(live)
        tied = [c for c, w in zip(cands, weights) if w is not None and w >= top - TOL]
        if len(tied) == 1:
            verdict = verdict_for(problem, tied[0])
        elif isinstance(problem.query, BooleanQuery):
            verdict = BooleanVerdict(Truth.UNKNOWN)
        elif isinstance(problem.query, FreeNumeric):
            verdict = ValueSetVerdict(tuple(sorted(c.value for c in tied)))
        else:
            verdict = FallbackVerdict("soft tie")
        return SoftReport(verdict, "II", candidate_weights=tuple(weights), **base)
    live = [c for c, f in zip(cands, flags) if f]
    fallback = _ambiguous(problem, live)
    outcome = None
    verdict = fallback
    if resolver is not None:
        outcome = resolver(engine, kept, cands, flags)
        label = getattr(outcome, "label", None)
        if label is not None:
            verdict = verdict_for(problem, next(c for c in cands if c.label == label))
    return SoftReport(verdict, "III", retrieval=outcome, **base)


def hard_solve(
    problem: Problem,
    sanitized: SanitizedFactSet | Sequence[WeightedFact],
    *,
    config: SolverConfig | None = None,
) -> Verdict:
    """Plain entailment without relaxation; inconsistent facts give Fallback."""
    facts = list(sanitized.facts if isinstance(sanitized, SanitizedFactSet) else sanitized)
    try:
        grounding, engine = prepare(problem, facts, config)
        if not check_sat(engine):
            return FallbackVerdict("inconsistent facts")
        q = problem.query
        if isinstance(q, BooleanQuery):
            return BooleanVerdict(entail_boolean(engine, grounding.query[0]))
        cands = candidates_for(problem, grounding)
        live = [c for c in cands if check_sat(engine, None, [c.formula])]
        if isinstance(q, FreeNumeric):
            return ValueSetVerdict(tuple(c.value for c in live))
        if len(live) == 1:
            return OptionVerdict(live[0].label)
        return FallbackVerdict("ambiguous options" if live else "no option satisfiable")
    except BudgetExceeded:
        return FallbackVerdict("budget exceeded")
    except (SortConflict, DomainEmpty) as err:
        return FallbackVerdict(str(err))
