"""Reasoning chains: normalisation, forward/backward generation, checking, rendering."""

from __future__ import annotations

from typing import Sequence

from ..solver.api import Truth
from .backward import backward_chain
from .forward import forward_chain
from .model import Chain, ChainResult, Literal, NoChain, Node, Residual, Rule, Step, Theory
from .normalize import normalize
from .render import render_chain, symbolic_listing, template_sentences
from .serialize import chain_from_json, chain_to_json, verify_document
from .state import kleene, query_as_rule, query_targets
from .verify import Fail, Pass, verify_chain


def verdict_answer(verdict) -> str | None:
    """The chain answer a verdict corresponds to, or None if it is not determinate."""
    from ..soft import BooleanVerdict, OptionVerdict, ValueSetVerdict

    if isinstance(verdict, BooleanVerdict):
        return None if verdict.value == Truth.UNKNOWN else verdict.value.value
    if isinstance(verdict, OptionVerdict):
        return verdict.label
    if isinstance(verdict, ValueSetVerdict) and len(verdict.values) == 1:
        return str(verdict.values[0])
    return None


def prepare_theory(problem, grounding, keep: Sequence[int] | None = None):
    """Theory and targets for chain generation, applying the implication-query split."""
    targets = query_targets(problem, grounding)
    assumptions: list[Literal] = []
    if len(targets) == 2 and targets[0][0] == Truth.TRUE.value:
        lits, consequent = query_as_rule(targets[0][1])
        if lits:
            from ..lang.ast import Not

            assumptions = lits
            targets = [(Truth.TRUE.value, consequent), (Truth.FALSE.value, Not(consequent))]
    theory = normalize(grounding, keep, assumptions)
    return theory, targets


def generate(problem, grounding, keep=None, direction: str = "both") -> dict[str, ChainResult]:
    theory, targets = prepare_theory(problem, grounding, keep)
    out: dict[str, ChainResult] = {}
    if direction in ("forward", "both"):
        out["forward"] = forward_chain(theory, targets)
    if direction in ("backward", "both"):
        out["backward"] = backward_chain(theory, targets)
    return out


def chain_correct(result: ChainResult, theory: Theory, targets, expected_verdict) -> bool:
    """Pipeline correctness flag for one direction.

    A chain counts when it verifies against the expected verdict.  When the
    expected verdict is Unknown, a clean stop (fixpoint or dead-end) is the
    right outcome.
    """
    expected = verdict_answer(expected_verdict)
    if isinstance(result, NoChain):
        from ..soft import BooleanVerdict

        unknown = isinstance(expected_verdict, BooleanVerdict) and expected_verdict.value == Truth.UNKNOWN
        return unknown and result.reason in ("fixpoint", "dead-end")
    return bool(verify_chain(result, theory, targets, expected))


__all__ = [
    "Chain",
    "ChainResult",
    "Fail",
    "Literal",
    "NoChain",
    "Node",
    "Pass",
    "Residual",
    "Rule",
    "Step",
    "Theory",
    "backward_chain",
    "chain_correct",
    "chain_from_json",
    "chain_to_json",
    "forward_chain",
    "generate",
    "kleene",
    "normalize",
    "prepare_theory",
    "query_as_rule",
    "query_targets",
    "render_chain",
    "symbolic_listing",
    "template_sentences",
    "verdict_answer",
    "verify_chain",
    "verify_document",
]
