"""Turning verified chains into text.

Template mode is deterministic and offline.  Gateway mode hands the
symbolic listing to an LLM for fluent prose.
"""

from __future__ import annotations

from typing import Mapping, Optional

from ..errors import GatewayError, GatewayUnavailable
from ..lang.ast import Atom, Compare, IntConst, Not
from ..lang.printer import to_text
from ..lang.problem import POS, Fold
from .model import Chain, Literal, NoChain, Step, Theory

_REL = {
    "<": "comes before",
    ">": "comes after",
    "<=": "is not after",
    ">=": "is not before",
    "=": "is in the same position as",
    "!=": "is in a different position from",
}


def _words(name: str) -> str:
    parts = [p for p in name.split("_") if p]
    if not parts:
        return name
    if all(p[1:] == p[1:].lower() for p in parts) and all(p[:1].islower() for p in parts[1:]):
        parts[0] = parts[0].lower()
    return " ".join(parts)


def _obj(name: str) -> str:
    text = name.replace("_", " ")
    return f"the {text}" if text[:1].islower() else text


def _article(noun: str) -> str:
    return ("an " if noun[:1] in "aeiou" else "a ") + noun


class Phraser:
    """Surface phrases for literals, given the fold table of the grounding."""

    def __init__(self, folds: Optional[Mapping[str, Fold]] = None) -> None:
        self.folds = dict(folds or {})

    def _predicate(self, atom: Atom, positive: bool) -> str:
        if not atom.args:
            clause = _words(atom.name).rstrip(".")
            return clause if positive else f"it is not the case that {clause}"
        subj = _obj(atom.args[0].name)
        fold = self.folds.get(atom.name)
        if fold is not None:
            objs = " and ".join(_obj(o) for o in fold.folded)
            verb = _words(fold.base)
            text = f"{subj} {verb} {objs}"
            return text if positive else f"it is not the case that {text}"
        noun = _words(atom.name)
        if noun.endswith("us") and " " not in noun:
            noun = _article(noun)
        return f"{subj} is {noun}" if positive else f"{subj} is not {noun}"

    def _numeric(self, atom: Atom, value, positive: bool) -> str:
        subj = _obj(atom.args[0].name) if atom.args else _words(atom.name)
        neg = "" if positive else "not "
        if atom.name == POS and atom.args:
            return f"{subj} is {neg}in position {value}"
        if atom.args:
            return f"the {_words(atom.name)} of {subj} is {neg}{value}"
        return f"{subj} is {neg}{value}"

    def literal(self, lit: Literal) -> str:
        if lit.boolean:
            return self._predicate(lit.atom, lit.value)
        return self._numeric(lit.atom, lit.value, lit.positive)

    def constraint(self, formula) -> str:
        if (
            isinstance(formula, Compare)
            and isinstance(formula.lhs, Atom)
            and isinstance(formula.rhs, Atom)
            and formula.lhs.name == formula.rhs.name == POS
        ):
            return f"{_obj(formula.lhs.args[0].name)} {_REL[formula.op]} {_obj(formula.rhs.args[0].name)}"
        if isinstance(formula, Not) and isinstance(formula.arg, Compare):
            return f"it is not the case that {to_text(formula.arg)}"
        return to_text(formula)


def _join(items: list[str]) -> str:
    items = list(dict.fromkeys(items))
    if len(items) <= 1:
        return "".join(items)
    return ", ".join(items[:-1]) + " and " + items[-1]


def _values(vals: list) -> str:
    text = [str(v) for v in vals]
    return text[0] if len(text) == 1 else ", ".join(text[:-1]) + " or " + text[-1]


def _cap(s: str) -> str:
    return s[:1].upper() + s[1:]


class _Renderer:
    def __init__(self, chain: Chain, theory: Optional[Theory], phraser: Phraser) -> None:
        self.chain = chain
        self.theory = theory
        self.p = phraser
        self.by_lit = {s.derived: s for s in chain.steps}

    def reasons(self, step: Step) -> list[str]:
        out = [self.p.literal(s) for s in step.supports]
        if step.via == "constraint" and self.theory is not None and step.ref is not None:
            if 0 <= step.ref < len(self.theory.residual):
                out.append(self.p.constraint(self.theory.residual[step.ref].formula))
        return out

    def _folded_exclusions(self, step: Step) -> Optional[list[Step]]:
        """Derived exclusions of one atom that an elimination step consumes."""
        if step.via != "elimination":
            return None
        parts = []
        for s in step.supports:
            sub = self.by_lit.get(s)
            if sub is None or sub.via in ("given", "assumption") or s.atom != step.derived.atom:
                return None
            parts.append(sub)
        return parts or None

    def sentences(self) -> list[str]:
        out: list[str] = []
        skip: set = set()
        folded: dict = {}
        for step in self.chain.steps:
            parts = self._folded_exclusions(step)
            if parts:
                folded[step.derived] = parts
                skip.update(p.derived for p in parts)
        for step in self.chain.steps:
            if step.via == "given" or step.derived in skip:
                continue
            lit = self.p.literal(step.derived)
            if step.via == "assumption":
                out.append(f"Suppose {lit}.")
                continue
            parts = folded.get(step.derived)
            if parts:
                reasons = [r for s in parts for r in self.reasons(s)]
                excluded = Literal(step.derived.atom, None, False)
                head = self.p.literal(excluded).replace(" None", "")
                vals = sorted(p.derived.value for p in parts)
                claim = f"{head} {_values(vals)}"
                out.append(f"Since {_join(reasons)}, {claim}." if reasons else f"{_cap(claim)}.")
                out.append(f"Therefore, {lit}.")
                continue
            reasons = self.reasons(step)
            out.append(f"Since {_join(reasons)}, {lit}." if reasons else f"{_cap(lit)}.")
        if not out:
            # the answer is stated outright
            out = [f"{_cap(self.p.literal(s.derived))}, as stated." for s in self.chain.steps]
        return out


def template_sentences(chain, theory: Optional[Theory] = None, folds=None) -> list[str]:
    if isinstance(chain, NoChain) or not chain.steps:
        return []
    return _Renderer(chain, theory, Phraser(folds)).sentences()


def symbolic_listing(chain: Chain, theory: Optional[Theory] = None) -> str:
    """One line per step, e.g. ``3. Wumpus(Fae)  [rule 9: Yumpus(Fae) -> Wumpus(Fae)]``."""
    lines = []
    for i, s in enumerate(chain.steps, 1):
        tag = s.via if s.ref is None else f"{s.via} {s.ref}"
        if theory is not None and s.ref is not None:
            if s.via == "rule":
                tag += f": {theory.rules[s.ref].text()}"
            elif s.via == "constraint":
                tag += f": {to_text(theory.residual[s.ref].formula)}"
        sup = ", ".join(x.text() for x in s.supports)
        lines.append(f"{i}. {s.derived.text()}  [{tag}]" + (f" from {sup}" if sup else ""))
    lines.append(f"Answer: {chain.answer}")
    return "\n".join(lines)


def render_chain(chain, mode: str = "template", *, theory=None, folds=None, gateway=None) -> str:
    if mode == "template":
        return "\n".join(f"{i}. {s}" for i, s in enumerate(template_sentences(chain, theory, folds), 1))
    if mode == "gateway":
        if isinstance(chain, NoChain) or not chain.steps:
            return ""
        if gateway is None:
            raise GatewayUnavailable("no gateway configured for chain rendering")
        try:
            return gateway.render(symbolic_listing(chain, theory))
        except GatewayUnavailable:
            raise
        except GatewayError as exc:
            raise GatewayUnavailable(str(exc)) from exc
    raise ValueError(f"unknown render mode {mode!r}")
