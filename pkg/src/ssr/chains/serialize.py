"""Self-contained JSON documents for chains, and checking them from scratch."""

from __future__ import annotations

import json
from typing import Any, Mapping, Optional, Sequence

from ..errors import ParseError
from ..lang.ast import Atom, Compare, IntConst, Not
from ..lang.parser import parse_formula
from ..lang.problem import Problem, parse_problem
from .model import Chain, Literal, NoChain, Node, Step
from .verify import Fail, Pass

FORMAT = "ssr-chain/1"


def literal_from_text(text: str) -> Literal:
    f = parse_formula(text)
    if isinstance(f, Atom):
        return Literal(f, True)
    if isinstance(f, Not) and isinstance(f.arg, Atom):
        return Literal(f.arg, False)
    if isinstance(f, Compare) and f.op in ("=", "!=") and isinstance(f.lhs, Atom) and isinstance(f.rhs, IntConst):
        return Literal(f.lhs, f.rhs.value, f.op == "=")
    raise ParseError(0, f"not a literal: {text!r}", text)


def problem_document(problem: Problem) -> dict:
    """Envelope with the facts as originally written (folds are re-derived on load)."""
    doc = problem.to_document()
    doc["facts"] = [[f.sentence, f.raw] for f in problem.facts]
    return doc


def _node_json(node: Node) -> dict:
    return {
        "literal": None if node.literal is None else node.literal.text(),
        "via": node.via,
        "children": [_node_json(c) for c in node.children],
    }


def _node_from(d: Mapping) -> Node:
    lit = d.get("literal")
    return Node(
        None if lit is None else literal_from_text(lit),
        d["via"],
        tuple(_node_from(c) for c in d.get("children", [])),
    )


def chain_to_json(
    chain: Chain | NoChain,
    problem: Problem,
    *,
    kept: Optional[Sequence[int]] = None,
    domains: Optional[Mapping[str, Sequence[int]]] = None,
    bound: Optional[int] = None,
    expected: Optional[str] = None,
) -> dict:
    doc: dict[str, Any] = {
        "format": FORMAT,
        "problem": problem_document(problem),
        "kept": None if kept is None else [int(i) for i in kept],
        "domains": {k: [int(v) for v in vals] for k, vals in (domains or {}).items()},
        "bound": bound,
        "expected": expected,
        "direction": chain.direction,
    }
    if isinstance(chain, NoChain):
        doc["no_chain"] = chain.reason
        return doc
    doc["answer"] = chain.answer
    doc["steps"] = [
        {
            "derived": s.derived.text(),
            "via": s.via,
            "ref": s.ref,
            "supports": [x.text() for x in s.supports],
        }
        for s in chain.steps
    ]
    doc["supports"] = [x.text() for x in chain.supports]
    doc["tree"] = _node_json(chain.tree)
    return doc


def chain_from_json(doc: Mapping) -> Chain | NoChain:
    if doc.get("format") != FORMAT:
        raise ParseError(0, f"unsupported chain format {doc.get('format')!r}")
    if "no_chain" in doc:
        return NoChain(doc["direction"], doc["no_chain"])
    steps = tuple(
        Step(
            literal_from_text(s["derived"]),
            s["via"],
            s.get("ref"),
            tuple(literal_from_text(x) for x in s.get("supports", [])),
        )
        for s in doc["steps"]
    )
    return Chain(
        doc["direction"],
        steps,
        str(doc["answer"]),
        tuple(literal_from_text(x) for x in doc.get("supports", [])),
        _node_from(doc["tree"]),
    )


def dumps(doc: Mapping) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def verify_document(doc: Mapping):
    """Rebuild the problem and theory from the document alone and check the chain.

    When the document carries no expected answer, the soft solver supplies it.
    """
    from ..sanitizer import Proceed, sanitize
    from ..soft import soft_solve
    from ..solver.api import SolverConfig
    from . import prepare_theory, verdict_answer
    from .verify import verify_chain

    chain = chain_from_json(doc)
    if isinstance(chain, NoChain):
        return Fail(None, f"no chain ({chain.reason})")
    problem = parse_problem(doc["problem"])
    decision = sanitize(problem)
    if not isinstance(decision, Proceed):
        return Fail(None, f"problem falls back to CoT: {decision.reason}")
    cfg = SolverConfig(domains={k: tuple(v) for k, v in (doc.get("domains") or {}).items()})
    if doc.get("bound") is not None:
        cfg = SolverConfig(domains=cfg.domains, bound=int(doc["bound"]))
    report = soft_solve(problem, decision.facts, config=cfg)
    if report.grounding is None:
        return Fail(None, "problem could not be grounded")
    kept = doc.get("kept")
    if kept is None:
        kept = report.kept
    theory, targets = prepare_theory(problem, report.grounding, kept)
    expected = doc.get("expected")
    if expected is None:
        expected = verdict_answer(report.verdict)
    result = verify_chain(chain, theory, targets, expected)
    return Pass() if result else result


__all__ = [
    "FORMAT",
    "chain_from_json",
    "chain_to_json",
    "dumps",
    "literal_from_text",
    "problem_document",
    "verify_document",
]
