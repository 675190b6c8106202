"""Backtracking engine with generalised arc consistency.

Domains are kept as bitmasks over each atom's value list.  A constraint is
propagated by enumerating the joint values of its unfixed atoms when that
product is small (``gac_limit``); larger constraints wait until more atoms
are fixed.  Branching takes the first unfixed atom in table order and tries
its values in ascending order, and propagation only removes values that
occur in no solution of the constraint, so the first model found is the
lexicographically least one.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from ..errors import BudgetExceeded
from ..lang.ast import atoms_of
from .compile import compile_formula
from .grounding import Grounding

DEFAULT_BUDGET = 10**7
_MEMO_CAP = 200_000
_DEFER = object()


class _Con:
    __slots__ = ("fn", "atoms")

    def __init__(self, fn, atoms: tuple[int, ...]) -> None:
        self.fn = fn
        self.atoms = atoms


class SearchEngine:
    kind = "search"

    def __init__(self, grounding: Grounding, *, budget: int = DEFAULT_BUDGET, gac_limit: int = 256) -> None:
        self.grounding = grounding
        self.table = grounding.table
        self.budget = budget
        self.gac_limit = gac_limit
        self.nodes = 0
        self._compiled: dict = {}
        self.side = [self._con(c.formula) for c in grounding.side_constraints]
        self.facts = {c.origin[1]: self._con(c.formula) for c in grounding.fact_constraints}
        self._memo: dict = {}

    def _con(self, formula) -> _Con:
        hit = self._compiled.get(formula)
        if hit is None:
            idx = self.table.index
            atoms = tuple(sorted({idx[a] for a in atoms_of(formula)}))
            hit = _Con(compile_formula(formula, idx), atoms)
            self._compiled[formula] = hit
        return hit

    def _revise(self, con: _Con, masks: list[int], vals: list):
        """Supported-value masks for the constraint's unfixed atoms.

        Returns None when the constraint has no support and ``_DEFER`` when
        the joint domain is still too large to enumerate.
        """
        doms = self.table.domains
        free = [a for a in con.atoms if masks[a] & (masks[a] - 1)]
        size = 1
        for a in free:
            size *= bin(masks[a]).count("1")
            if size > self.gac_limit:
                return _DEFER
        key = (id(con), tuple(masks[a] for a in con.atoms))
        if key in self._memo:
            return self._memo[key]
        for a in con.atoms:
            if a not in free:
                vals[a] = doms[a][masks[a].bit_length() - 1]
        options = [[k for k in range(len(doms[a])) if masks[a] >> k & 1] for a in free]
        support = [0] * len(free)
        alive = False
        for combo in itertools.product(*options):
            for a, k in zip(free, combo):
                vals[a] = doms[a][k]
            if con.fn(vals):
                alive = True
                for j, k in enumerate(combo):
                    support[j] |= 1 << k
        result = tuple(zip(free, support)) if alive else None
        if len(self._memo) > _MEMO_CAP:
            self._memo.clear()
        self._memo[key] = result
        return result

    def _propagate(self, cons: list[_Con], watch: dict, masks: list[int], queue: list[int], vals: list) -> bool:
        queued = set(queue)
        while queue:
            ci = queue.pop()
            queued.discard(ci)
            res = self._revise(cons[ci], masks, vals)
            if res is None:
                return False
            if res is _DEFER:
                continue
            for a, sup in res:
                if sup != masks[a]:
                    masks[a] = sup
                    for other in watch[a]:
                        if other != ci and other not in queued:
                            queued.add(other)
                            queue.append(other)
        return True

    def _solve(self, cons: list[_Con]) -> dict | None:
        n = len(self.table)
        doms = self.table.domains
        vals: list = [d[0] for d in doms]
        masks = [(1 << len(d)) - 1 for d in doms]
        watch: dict[int, list[int]] = {a: [] for a in range(n)}
        for ci, c in enumerate(cons):
            for a in c.atoms:
                watch[a].append(ci)
        if not self._propagate(cons, watch, masks, list(range(len(cons))), vals):
            return None
        # explicit stack of (masks, atom, remaining values)
        stack: list[tuple[list[int], int, list[int]]] = []

        def next_free(ms: list[int]) -> int:
            for a in range(n):
                if ms[a] & (ms[a] - 1):
                    return a
            return -1

        a = next_free(masks)
        if a < 0:
            return self._finish(cons, masks)
        stack.append((masks, a, [k for k in range(len(doms[a])) if masks[a] >> k & 1]))
        while stack:
            base, a, rest = stack[-1]
            if not rest:
                stack.pop()
                continue
            k = rest.pop(0)
            self.nodes += 1
            if self.nodes > self.budget:
                raise BudgetExceeded(f"search exceeded {self.budget} nodes")
            ms = list(base)
            ms[a] = 1 << k
            if not self._propagate(cons, watch, ms, list(watch[a]), vals):
                continue
            b = next_free(ms)
            if b < 0:
                model = self._finish(cons, ms)
                if model is not None:
                    return model
                continue
            stack.append((ms, b, [j for j in range(len(doms[b])) if ms[b] >> j & 1]))
        return None

    def _finish(self, cons: list[_Con], masks: list[int]) -> dict | None:
        doms = self.table.domains
        vals = [doms[a][m.bit_length() - 1] for a, m in enumerate(masks)]
        if all(c.fn(vals) for c in cons):
            return {atom: vals[i] for i, atom in enumerate(self.table.atoms)}
        return None

    def check(self, keep: Iterable[int] | None = None, extra: Sequence = ()):
        from .api import Sat, Unsat

        self.nodes = 0
        keys = sorted(self.facts) if keep is None else list(keep)
        cons = self.side + [self.facts[i] for i in keys] + [self._con(f) for f in extra]
        model = self._solve(cons)
        return Unsat() if model is None else Sat(model)
