"""Goal-directed AND-OR search from the query target.

Sub-goals come from Horn rules concluding the goal, from elimination (a
binding holds when every other value is excluded) and from residual
constraints (a value is excluded when the constraint leaves it no support,
either outright or once a single other atom is bound).  The path set
detects cycles; iterative deepening returns a proof of minimal depth.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..lang.ast import And, Atom, Compare, IntConst, Not, Or
from ..solver.compile import compile_formula
from .model import Chain, Literal, NoChain, Step, Theory, build_tree
from .state import ENUM_LIMIT

MAX_DEPTH = 64


@dataclass
class _Fail:
    cycle: bool = False
    depth: bool = False

    def merge(self, other: "_Fail") -> None:
        self.cycle |= other.cycle
        self.depth |= other.depth


class _Prover:
    def __init__(self, theory: Theory) -> None:
        self.t = theory
        self.given = {l: "given" for l in theory.properties}
        for l in theory.assumptions:
            self.given.setdefault(l, "assumption")
        self.by_head: dict[Literal, list[int]] = {}
        for ri, r in enumerate(theory.rules):
            if r.horn:
                self.by_head.setdefault(r.conclusions[0], []).append(ri)
        self.res_of: dict[Atom, list[int]] = {}
        for xi, res in enumerate(theory.residual):
            for a in res.atoms:
                self.res_of.setdefault(a, []).append(xi)
        self.fns = {}
        self.unsup: dict = {}
        self.memo: dict = {}
        self.dead: set = set()
        self.seen: set = set()
        self.nodes = 0

    def _fn(self, xi: int):
        fn = self.fns.get(xi)
        if fn is None:
            res = self.t.residual[xi]
            fn = self.fns[xi] = compile_formula(res.formula, {a: i for i, a in enumerate(res.atoms)})
        return fn

    def _unsupported(self, xi: int, lit: Literal, fixed: Literal | None) -> bool:
        """True when the residual admits no assignment with ``lit`` false."""
        key = (xi, lit, fixed)
        hit = self.unsup.get(key)
        if hit is None:
            hit = self.unsup[key] = self._enumerate(xi, lit, fixed)
        return hit

    def _enumerate(self, xi: int, lit: Literal, fixed: Literal | None) -> bool:
        res = self.t.residual[xi]
        doms = []
        for a in res.atoms:
            d = self.t.domains[a]
            if a == lit.atom:
                d = lit.negate().restrict(d)
            elif fixed is not None and a == fixed.atom:
                d = fixed.restrict(d)
            doms.append(d)
        size = 1
        for d in doms:
            size *= len(d)
        if size > ENUM_LIMIT:
            return False
        fn = self._fn(xi)
        return not any(fn(combo) for combo in itertools.product(*doms))

    def prove(self, goal: Literal, rem: int, path: frozenset):
        """(height, steps) on success, _Fail otherwise."""
        if goal in self.given:
            return 0, [Step(goal, self.given[goal])]
        if goal in path:
            return _Fail(cycle=True)
        if rem <= 0:
            return _Fail(depth=True)
        if goal in self.dead:
            return _Fail()
        key = (goal, rem)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        self.nodes += 1
        self.seen.add(goal)
        fail = _Fail()
        path = path | {goal}
        out = None
        for ri in self.by_head.get(goal, ()):
            r = self.t.rules[ri]
            got = self._all(r.premises, rem - 1, path, fail)
            if got is not None:
                h, steps = got
                out = (h + 1, steps + [Step(goal, "rule", ri, r.premises)])
                break
        if out is None and goal.is_binding:
            others = [Literal(goal.atom, v, False) for v in self.t.domains[goal.atom] if v != goal.value]
            got = self._all(others, rem - 1, path, fail)
            if got is not None:
                h, steps = got
                out = (h + 1, steps + [Step(goal, "elimination", None, tuple(others))])
        if out is None and goal.is_binding:
            out = self._by_permutation(goal, rem, path, fail)
        if out is None and not goal.is_binding:
            out = self._by_residual(goal, rem, path, fail)
        if out is None:
            out = fail
        if isinstance(out, _Fail) and not (out.cycle or out.depth):
            self.dead.add(goal)
        else:
            # cycle failures are cached too; the cut depends on the path, so
            # a proof reachable only along another path can be missed, but
            # without this the search is exponential on ordering puzzles
            self.memo[key] = out
        return out

    def _all(self, goals, rem, path, fail: _Fail):
        height, steps = 0, []
        for g in goals:
            got = self.prove(g, rem, path)
            if isinstance(got, _Fail):
                fail.merge(got)
                return None
            height = max(height, got[0])
            steps += got[1]
        return height, steps

    def _by_permutation(self, goal: Literal, rem: int, path, fail: _Fail):
        for gi, group in enumerate(self.t.groups):
            values = self.t.domains[group[0]]
            if goal.atom not in group or len(values) != len(group):
                continue
            others = [Literal(o, goal.value, False) for o in group if o != goal.atom]
            got = self._all(others, rem - 1, path, fail)
            if got is not None:
                return got[0] + 1, got[1] + [Step(goal, "permutation", gi, tuple(others))]
        return None

    def _by_residual(self, goal: Literal, rem: int, path, fail: _Fail):
        for xi in self.res_of.get(goal.atom, ()):
            if self._unsupported(xi, goal, None):
                return 1, [Step(goal, "constraint", xi, ())]
        for xi in self.res_of.get(goal.atom, ()):
            for other in self.t.residual[xi].atoms:
                if other == goal.atom:
                    continue
                for v in self.t.domains[other]:
                    b = Literal(other, v) if isinstance(v, bool) else Literal(other, v, True)
                    if not self._unsupported(xi, goal, b):
                        continue
                    got = self.prove(b, rem - 1, path)
                    if isinstance(got, _Fail):
                        fail.merge(got)
                        continue
                    return got[0] + 1, got[1] + [Step(goal, "constraint", xi, (b,))]
        return None

    def prove_formula(self, f, rem: int, fail: _Fail):
        """Proof of a target formula built from literals with and/or."""
        lits = _literal_tree(f)
        if lits is None:
            return None
        return self._tree(lits, rem, fail)

    def _tree(self, node, rem, fail):
        if isinstance(node, Literal):
            got = self.prove(node, rem, frozenset())
            if isinstance(got, _Fail):
                fail.merge(got)
                return None
            return got[0], got[1], [node]
        kind, items = node
        if kind == "or":
            for it in items:
                got = self._tree(it, rem, fail)
                if got is not None:
                    return got
            return None
        height, steps, roots = 0, [], []
        for it in items:
            got = self._tree(it, rem, fail)
            if got is None:
                return None
            height = max(height, got[0])
            steps += got[1]
            roots += got[2]
        return height, steps, roots


def _literal_tree(f, neg: bool = False):
    if isinstance(f, Atom):
        return Literal(f, not neg)
    if isinstance(f, Not):
        return _literal_tree(f.arg, not neg)
    if isinstance(f, (And, Or)):
        kind = "and" if isinstance(f, And) != neg else "or"
        items = [_literal_tree(a, neg) for a in f.args]
        return None if any(i is None for i in items) else (kind, items)
    if isinstance(f, Compare) and f.op in ("=", "!=") and isinstance(f.lhs, Atom) and isinstance(f.rhs, IntConst):
        return Literal(f.lhs, f.rhs.value, (f.op == "=") != neg)
    return None


def _dedupe(steps):
    seen = set()
    out = []
    for s in steps:
        if s.derived not in seen:
            seen.add(s.derived)
            out.append(s)
    return out


def backward_chain(theory: Theory, targets, max_depth: int = MAX_DEPTH) -> Chain | NoChain:
    return _search(_Prover(theory), targets, max_depth)


def _search(prover: _Prover, targets, max_depth: int) -> Chain | NoChain:
    fail = _Fail()
    for depth in range(1, max_depth + 1):
        fail = _Fail()
        for answer, f in targets:
            got = prover.prove_formula(f, depth, fail)
            if got is not None:
                _, steps, roots = got
                steps = _dedupe(steps)
                return Chain("backward", tuple(steps), answer, tuple(dict.fromkeys(roots)), build_tree(steps, roots, answer))
        # an acyclic path never repeats a goal, so once the depth exceeds
        # the number of distinct goals reached, a cut cannot hide a proof
        if not fail.depth or depth > len(prover.seen):
            break
    if fail.cycle:
        return NoChain("backward", "cycle")
    if fail.depth:
        return NoChain("backward", "depth")
    return NoChain("backward", "dead-end")
