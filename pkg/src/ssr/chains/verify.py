"""Independent checker for chains, whoever produced them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from ..solver.compile import compile_formula
from .model import Chain, Literal, Node, Theory
from .state import ENUM_LIMIT, kleene


@dataclass(frozen=True)
class Pass:
    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Fail:
    step: Optional[int]
    reason: str

    def __bool__(self) -> bool:
        return False


VerifyResult = Union[Pass, Fail]


def _local(theory: Theory, supports) -> dict:
    doms = dict(theory.domains)
    for s in supports:
        doms[s.atom] = s.restrict(doms[s.atom])
    return doms


def _implied(lit: Literal, supports, theory: Theory) -> bool:
    """Whether the supports alone force ``lit`` (used for falsified rule alternatives)."""
    dom = _local(theory, supports)[lit.atom]
    return lit.status(dom) is True


def _check_step(i: int, step, theory: Theory, known: set) -> Optional[str]:
    for s in step.supports:
        if s not in known:
            return f"support {s} is not established earlier"
    lit = step.derived
    if lit.atom not in theory.domains:
        return f"unknown atom in {lit}"
    if step.via == "given":
        return None if lit in theory.properties else f"{lit} is not a given property"
    if step.via == "assumption":
        return None if lit in theory.assumptions else f"{lit} is not a query assumption"
    if step.via == "rule":
        if step.ref is None or not 0 <= step.ref < len(theory.rules):
            return "rule reference out of range"
        rule = theory.rules[step.ref]
        if lit not in rule.conclusions:
            return f"{lit} is not a conclusion of rule {step.ref}"
        for p in rule.premises:
            if not _implied(p, step.supports, theory):
                return f"premise {p} of rule {step.ref} not supported"
        for c in rule.conclusions:
            if c != lit and not _implied(c.negate(), step.supports, theory):
                return f"alternative {c} of rule {step.ref} not excluded"
        return None
    if step.via == "elimination":
        if not lit.is_binding:
            return "elimination must derive a binding"
        for v in theory.domains[lit.atom]:
            if v != lit.value and Literal(lit.atom, v, False) not in step.supports and not _implied(
                Literal(lit.atom, v, False), step.supports, theory
            ):
                return f"value {v} of {lit.atom.name} not excluded"
        return None
    if step.via == "constraint":
        if step.ref is None or not 0 <= step.ref < len(theory.residual):
            return "constraint reference out of range"
        res = theory.residual[step.ref]
        if lit.atom not in res.atoms:
            return f"{lit} does not mention the constraint's atoms"
        doms = _local(theory, step.supports)
        doms[lit.atom] = lit.negate().restrict(theory.domains[lit.atom])
        spaces = [doms[a] for a in res.atoms]
        size = 1
        for d in spaces:
            size *= len(d)
        if size > ENUM_LIMIT:
            return "constraint too large to check"
        fn = compile_formula(res.formula, {a: j for j, a in enumerate(res.atoms)})
        if any(fn(c) for c in itertools.product(*spaces)):
            return f"constraint {step.ref} does not force {lit}"
        return None
    if step.via == "permutation":
        if step.ref is None or not 0 <= step.ref < len(theory.groups):
            return "group reference out of range"
        group = theory.groups[step.ref]
        values = theory.domains[group[0]]
        if lit.atom not in group or not lit.is_binding or len(values) != len(group):
            return "permutation step does not fit its group"
        for o in group:
            if o != lit.atom and not _implied(Literal(o, lit.value, False), step.supports, theory):
                return f"{o.name} not excluded from {lit.value}"
        return None
    return f"unknown step kind {step.via!r}"


def _check_tree(node: Node, by_lit: dict) -> Optional[str]:
    for child in node.children:
        step = by_lit.get(child.literal)
        if step is None:
            return f"tree node {child.literal} has no step"
        if child.via != step.via or tuple(c.literal for c in child.children) != step.supports:
            return f"tree node {child.literal} disagrees with its step"
        err = _check_tree(child, by_lit)
        if err:
            return err
    return None


def verify_chain(chain: Chain, theory: Theory, targets, expected: Optional[str]) -> VerifyResult:
    """Check every step, the conclusion and the tree.

    ``targets`` are the (answer, formula) pairs for the query; ``expected``
    is the answer the chain must reach (None means no determinate answer,
    so no chain can agree).
    """
    known: set = set()
    for i, step in enumerate(chain.steps):
        err = _check_step(i, step, theory, known)
        if err:
            return Fail(i, err)
        known.add(step.derived)
    for s in chain.supports:
        if s not in known:
            return Fail(None, f"conclusion support {s} is not derived")
    formula = dict(targets).get(chain.answer)
    if formula is None:
        return Fail(None, f"answer {chain.answer!r} is not a query target")
    if kleene(formula, _local(theory, chain.supports)) is not True:
        return Fail(None, "supports do not determine the answer")
    if expected is None or chain.answer != expected:
        return Fail(None, f"conclusion {chain.answer} does not match verdict {expected}")
    by_lit = {s.derived: s for s in chain.steps}
    root = chain.tree
    if tuple(c.literal for c in root.children) != chain.supports:
        return Fail(None, "tree root disagrees with the conclusion")
    err = _check_tree(root, by_lit)
    if err:
        return Fail(None, err)
    return Pass()
