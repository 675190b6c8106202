"""Exhaustive engine for small assignment spaces.

Every assignment is materialised as one row of a matrix in canonical
(lexicographic) order, so the first satisfying row is the least model.
Each constraint becomes a truth vector over the rows, computed by the
postfix kernels or, for formulas the kernels cannot express, by the
Python closures row by row.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .. import _kernels as K
from ..errors import BudgetExceeded, KernelUnsupported
from ..lang.ast import And, Arith, Atom, BoolVal, Compare, Iff, Implies, IntConst, Not, Or
from .compile import compile_formula
from .grounding import Grounding

DENSE_LIMIT = 1 << 16
MAX_ROWS = 1 << 22  # hard cap even when the dense engine is forced
_MAG = 1 << 62


def lower(formula, index, bounds) -> np.ndarray:
    """Postfix program for ``formula``; ``bounds[i]`` is atom i's (lo, hi)."""
    code: list[tuple[int, int]] = []

    def num(e) -> tuple[int, int]:
        if isinstance(e, IntConst):
            code.append((K.CONST, e.value))
            return e.value, e.value
        if isinstance(e, Atom):
            i = index[e]
            code.append((K.LOAD, i))
            return bounds[i]
        if isinstance(e, Arith):
            if e.op == "/":
                raise KernelUnsupported("exact division")
            if e.op in ("//", "**") and not isinstance(e.rhs, IntConst):
                raise KernelUnsupported(f"{e.op} with a non-constant right operand")
            lo1, hi1 = num(e.lhs)
            lo2, hi2 = num(e.rhs)
            if e.op == "+":
                lo, hi = lo1 + lo2, hi1 + hi2
            elif e.op == "-":
                lo, hi = lo1 - hi2, hi1 - lo2
            elif e.op == "*":
                ps = (lo1 * lo2, lo1 * hi2, hi1 * lo2, hi1 * hi2)
                lo, hi = min(ps), max(ps)
            elif e.op == "//":
                d = e.rhs.value
                if d == 0:
                    raise KernelUnsupported("floor division by zero")
                qs = (lo1 // d, hi1 // d)
                lo, hi = min(qs), max(qs)
            else:
                p = e.rhs.value
                if p < 0 or p > 8:
                    raise KernelUnsupported("exponent outside 0..8")
                m = max(abs(lo1), abs(hi1)) ** p
                lo, hi = (-m, m) if lo1 < 0 else (min(lo1**p, hi1**p), m)
            if max(abs(lo), abs(hi)) > _MAG:
                raise KernelUnsupported("int64 overflow risk")
            code.append((K.ARITH_CODES[e.op], 0))
            return lo, hi
        raise KernelUnsupported(f"not a numeric expression: {e!r}")

    def go(f) -> None:
        if isinstance(f, Atom):
            code.append((K.LOAD, index[f]))
        elif isinstance(f, BoolVal):
            code.append((K.CONST, int(f.value)))
        elif isinstance(f, Not):
            go(f.arg)
            code.append((K.NOT, 0))
        elif isinstance(f, (And, Or)):
            for a in f.args:
                go(a)
            code.append((K.AND if isinstance(f, And) else K.OR, len(f.args)))
        elif isinstance(f, (Implies, Iff)):
            go(f.lhs)
            go(f.rhs)
            code.append((K.IMP if isinstance(f, Implies) else K.IFF, 0))
        elif isinstance(f, Compare):
            num(f.lhs)
            num(f.rhs)
            code.append((K.REL_CODES[f.op], 0))
        else:
            raise KernelUnsupported(f"cannot lower {f!r}")

    go(formula)
    return np.array(code, dtype=np.int64).reshape(-1, 2)


def assignment_matrix(domains: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    """(index matrix, value matrix), rows in lexicographic order.

    Both are column-major: the evaluator reads one atom's column at a time.
    """
    sizes = [len(d) for d in domains]
    m = int(np.prod(sizes, dtype=np.int64)) if sizes else 1
    idx = np.zeros((m, len(sizes)), dtype=np.int64, order="F")
    stride = m
    for j, s in enumerate(sizes):
        stride //= s
        idx[:, j] = (np.arange(m, dtype=np.int64) // stride) % s
    vals = np.zeros_like(idx)
    for j, d in enumerate(domains):
        vals[:, j] = np.asarray([int(v) for v in d], dtype=np.int64)[idx[:, j]]
    return idx, vals


class DenseEngine:
    kind = "dense"

    def __init__(self, grounding: Grounding) -> None:
        table = grounding.table
        if table.space_size() > MAX_ROWS:
            raise BudgetExceeded(f"{table.space_size()} assignments is too many for the dense engine")
        self.grounding = grounding
        self.table = table
        self.idx, self.values = assignment_matrix(table.domains)
        self.rows = self.values.shape[0]
        self.bounds = [(min(map(int, d)), max(map(int, d))) for d in table.domains]
        self._cache: dict = {}
        self.facts = {c.origin[1]: c.formula for c in grounding.fact_constraints}
        side = [self.truth(c.formula) for c in grounding.side_constraints]
        self.side = np.logical_and.reduce(side) if side else np.ones(self.rows, dtype=bool)
        self._all_facts: np.ndarray | None = None
        self.kernel_misses = 0

    def truth(self, formula) -> np.ndarray:
        hit = self._cache.get(formula)
        if hit is not None:
            return hit
        try:
            code = lower(formula, self.table.index, self.bounds)
            vec = K.eval_program(code, self.values).astype(bool)
        except KernelUnsupported:
            self.kernel_misses += 1
            fn = compile_formula(formula, self.table.index)
            vec = np.fromiter((bool(fn(row)) for row in self._python_rows()), dtype=bool, count=self.rows)
        self._cache[formula] = vec
        return vec

    def _python_rows(self):
        doms = self.table.domains
        for r in self.idx:
            yield [doms[j][k] for j, k in enumerate(r)]

    def mask(self, keep: Iterable[int] | None = None, extra: Sequence = ()) -> np.ndarray:
        if keep is None:
            if self._all_facts is None:
                acc = self.side.copy()
                for f in self.facts.values():
                    acc &= self.truth(f)
                self._all_facts = acc
            acc = self._all_facts.copy()
        else:
            acc = self.side.copy()
            for i in keep:
                acc &= self.truth(self.facts[i])
        for f in extra:
            acc &= self.truth(f)
        return acc

    def model_at(self, row: int) -> dict:
        doms = self.table.domains
        return {a: doms[j][int(k)] for j, (a, k) in enumerate(zip(self.table.atoms, self.idx[row]))}

    def first(self, mask: np.ndarray) -> int:
        if not mask.any():
            return -1
        return int(np.argmax(mask))

    def check(self, keep: Iterable[int] | None = None, extra: Sequence = ()):
        from .api import Sat, Unsat

        row = self.first(self.mask(keep, extra))
        if row < 0:
            return Unsat()
        return Sat(self.model_at(row))

    def best_subset(self, order: Sequence[int], weights: Sequence[float], extra: Sequence = (), tol: float = 1e-9):
        """Kept fact indices of the optimal subset, or None if side ∧ extra is Unsat."""
        ok = self.mask([], extra)
        if not ok.any():
            return None
        truth = np.vstack([self.truth(self.facts[i]) for i in order]) if order else np.zeros((0, self.rows), bool)
        row = K.best_row(truth.astype(np.uint8), np.asarray(weights, dtype=np.float64), ok.astype(np.uint8), tol)
        return [i for i, t in zip(order, truth[:, row]) if t]
