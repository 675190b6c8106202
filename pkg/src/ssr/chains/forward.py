"""Forward chaining to a fixpoint, with elimination over disjunctions and domains."""

from __future__ import annotations

import itertools
from typing import Sequence

from ..lang.ast import And, Atom, BoolVal, Compare, Iff, Implies, Not, Or, atoms_of
from ..solver.compile import compile_formula
from .model import Chain, Literal, NoChain, Step, Theory, build_tree
from .state import ENUM_LIMIT, kleene


class _State:
    def __init__(self, theory: Theory) -> None:
        self.theory = theory
        self.domains = dict(theory.domains)
        self.full = theory.domains
        self.steps: list[Step] = []
        self.by_lit: dict[Literal, Step] = {}
        self.conflict = False

    def known(self, lit: Literal) -> bool:
        return lit.status(self.domains[lit.atom]) is True

    def add(self, step: Step) -> bool:
        lit = step.derived
        dom = self.domains[lit.atom]
        if lit.status(dom) is True or lit in self.by_lit:
            return False
        new = lit.restrict(dom)
        if not new:
            self.conflict = True
            return False
        self.domains[lit.atom] = new
        self.steps.append(step)
        self.by_lit[lit] = step
        return True

    def justify(self, lit: Literal) -> list[Literal]:
        """Derived literals that establish ``lit`` (which must be known)."""
        if lit in self.by_lit:
            return [lit]
        dom = self.domains[lit.atom]
        if lit.is_binding and dom == (lit.value,):
            return self.domain_support(lit.atom)
        if len(dom) == 1:
            binding = Literal(lit.atom, dom[0], True) if not lit.boolean else Literal(lit.atom, dom[0])
            if binding in self.by_lit:
                return [binding]
        raise KeyError(f"{lit} is known without a derivation")

    def domain_support(self, atom: Atom) -> list[Literal]:
        """Literals justifying the current domain of ``atom``."""
        dom = self.domains[atom]
        full = self.full[atom]
        if len(dom) == len(full):
            return []
        if len(dom) == 1:
            b = Literal(atom, dom[0]) if isinstance(dom[0], bool) else Literal(atom, dom[0], True)
            if b in self.by_lit:
                return [b]
        out = []
        for v in full:
            if v not in dom:
                out += self.justify(Literal(atom, v, False))
        return list(dict.fromkeys(out))


def explain(f, st: _State) -> list[Literal]:
    """Known literals that make ``f`` evaluate to its current (determined) value."""
    want = kleene(f, st.domains)
    if isinstance(f, Atom):
        return st.justify(Literal(f, want))
    if isinstance(f, Not):
        return explain(f.arg, st)
    if isinstance(f, (And, Or)):
        decisive = False if isinstance(f, And) else True
        if want == decisive:
            for a in f.args:
                if kleene(a, st.domains) == decisive:
                    return explain(a, st)
        out: list[Literal] = []
        for a in f.args:
            out += explain(a, st)
        return list(dict.fromkeys(out))
    if isinstance(f, Implies):
        return explain(Or((Not(f.lhs), f.rhs)), st)
    if isinstance(f, Iff):
        return list(dict.fromkeys(explain(f.lhs, st) + explain(f.rhs, st)))
    if isinstance(f, Compare):
        out = []
        for a in dict.fromkeys(atoms_of(f)):
            dom = st.domains[a]
            if len(dom) == 1 and not isinstance(dom[0], bool):
                b = Literal(a, dom[0], True)
                if b in st.by_lit:
                    out.append(b)
                    continue
            out += st.domain_support(a)
        return list(dict.fromkeys(out))
    if isinstance(f, BoolVal):
        return []
    raise TypeError(f"cannot explain {f!r}")


def _fire_rules(st: _State) -> bool:
    changed = False
    for ri, rule in enumerate(st.theory.rules):
        if not all(st.known(p) for p in rule.premises):
            continue
        stats = [c.status(st.domains[c.atom]) for c in rule.conclusions]
        if True in stats:
            continue
        open_ = [c for c, s in zip(rule.conclusions, stats) if s is None]
        if len(open_) != 1:
            if not open_:
                st.conflict = True
            continue
        sup: list[Literal] = []
        for p in rule.premises:
            sup += st.justify(p)
        for c, s in zip(rule.conclusions, stats):
            if s is False:
                sup += st.justify(c.negate())
        if st.add(Step(open_[0], "rule", ri, tuple(dict.fromkeys(sup)))):
            changed = True
            return changed
    return changed


def _eliminate(st: _State) -> bool:
    for atom, dom in st.domains.items():
        if len(dom) != 1 or isinstance(dom[0], bool):
            continue
        b = Literal(atom, dom[0], True)
        if b in st.by_lit:
            continue
        sup = [Literal(atom, v, False) for v in st.full[atom] if v != dom[0]]
        sup = [x for s in sup for x in st.justify(s)]
        return st.add(Step(b, "elimination", None, tuple(dict.fromkeys(sup))))
    return False


def _permute(st: _State) -> bool:
    for gi, group in enumerate(st.theory.groups):
        values = st.full[group[0]]
        if any(st.full[a] != values for a in group) or len(values) != len(group):
            continue
        for v in values:
            holders = [a for a in group if v in st.domains[a]]
            if len(holders) != 1:
                continue
            a = holders[0]
            b = Literal(a, v, True)
            if len(st.domains[a]) == 1 or b in st.by_lit:
                continue
            sup = [x for o in group if o != a for x in st.justify(Literal(o, v, False))]
            return st.add(Step(b, "permutation", gi, tuple(dict.fromkeys(sup))))
    return False


def _prune(st: _State, compiled: dict) -> bool:
    for ri, res in enumerate(st.theory.residual):
        atoms = res.atoms
        doms = [st.domains[a] for a in atoms]
        size = 1
        for d in doms:
            size *= len(d)
        if size > ENUM_LIMIT or size == 1:
            continue
        fn = compiled.get(ri)
        if fn is None:
            index = {a: i for i, a in enumerate(atoms)}
            fn = compiled[ri] = compile_formula(res.formula, index)
        support = [set() for _ in atoms]
        for combo in itertools.product(*doms):
            if fn(combo):
                for j, v in enumerate(combo):
                    support[j].add(v)
        for j, a in enumerate(atoms):
            for v in doms[j]:
                if v in support[j]:
                    continue
                if isinstance(v, bool):
                    lit = Literal(a, not v)
                else:
                    lit = Literal(a, v, False)
                sup = [x for o in atoms if o != a for x in st.domain_support(o)]
                if st.add(Step(lit, "constraint", ri, tuple(dict.fromkeys(sup)))):
                    return True
    return False


def _determined(st: _State, targets) -> tuple[str, object] | None:
    for answer, f in targets:
        if kleene(f, st.domains) is True:
            return answer, f
    return None


def _minimal(steps: Sequence[Step], roots: Sequence[Literal]) -> list[Step]:
    by_lit = {s.derived: s for s in steps}
    need: set[Literal] = set()
    stack = list(roots)
    while stack:
        lit = stack.pop()
        if lit in need:
            continue
        need.add(lit)
        stack.extend(by_lit[lit].supports)
    return [s for s in steps if s.derived in need]


def forward_chain(theory: Theory, targets) -> Chain | NoChain:
    """Derive until one target formula is true, then keep only the steps it uses."""
    st = _State(theory)
    for lit in theory.properties:
        st.add(Step(lit, "given"))
    for lit in theory.assumptions:
        st.add(Step(lit, "assumption"))
    if st.conflict:
        return NoChain("forward", "conflict")
    compiled: dict = {}
    limit = sum(len(d) for d in theory.domains.values()) + len(theory.properties) + 1
    for _ in range(limit * 2):
        hit = _determined(st, targets)
        if hit is not None:
            answer, f = hit
            roots = explain(f, st)
            steps = _minimal(st.steps, roots)
            return Chain("forward", tuple(steps), answer, tuple(roots), build_tree(steps, roots, answer))
        if st.conflict:
            return NoChain("forward", "conflict")
        if not (_fire_rules(st) or _eliminate(st) or _permute(st) or _prune(st, compiled)):
            return NoChain("forward", "fixpoint")
    return NoChain("forward", "fixpoint")
