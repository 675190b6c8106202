"""Hot loops for the dense engine.

Formulas are lowered to a postfix program (an ``(L, 2)`` int64 array of
``opcode, argument`` pairs) and run over every row of the assignment
matrix at once.  Numba is used when available; ``SSR_DISABLE_NUMBA=1``
selects the pure numpy path, which must give identical results.
"""

from __future__ import annotations

import os

import numpy as np

LOAD, CONST, NOT, AND, OR, IMP, IFF = 0, 1, 2, 3, 4, 5, 6
EQ, NE, LT, GT, LE, GE = 7, 8, 9, 10, 11, 12
ADD, SUB, MUL, FLOORDIV, POW = 13, 14, 15, 16, 17

REL_CODES = {"=": EQ, "!=": NE, "<": LT, ">": GT, "<=": LE, ">=": GE}
ARITH_CODES = {"+": ADD, "-": SUB, "*": MUL, "//": FLOORDIV, "**": POW}

DISABLED = os.environ.get("SSR_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if DISABLED:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - depends on the environment
    njit = None

USING_NUMBA = njit is not None
_BLOCK = 2048  # rows per block in the compiled evaluator


def _np_eval_program(code: np.ndarray, values: np.ndarray) -> np.ndarray:
    m = values.shape[0]
    stack: list[np.ndarray] = []
    for op, arg in code.tolist():
        if op == LOAD:
            stack.append(values[:, arg])
        elif op == CONST:
            stack.append(np.full(m, arg, dtype=np.int64))
        elif op == NOT:
            stack.append((stack.pop() == 0).astype(np.int64))
        elif op == AND or op == OR:
            parts = stack[-arg:]
            del stack[-arg:]
            acc = parts[0] != 0
            for p in parts[1:]:
                acc = (acc & (p != 0)) if op == AND else (acc | (p != 0))
            stack.append(acc.astype(np.int64))
        else:
            b = stack.pop()
            a = stack.pop()
            if op == IMP:
                r = (a == 0) | (b != 0)
            elif op == IFF:
                r = (a != 0) == (b != 0)
            elif op == EQ:
                r = a == b
            elif op == NE:
                r = a != b
            elif op == LT:
                r = a < b
            elif op == GT:
                r = a > b
            elif op == LE:
                r = a <= b
            elif op == GE:
                r = a >= b
            elif op == ADD:
                r = a + b
            elif op == SUB:
                r = a - b
            elif op == MUL:
                r = a * b
            elif op == FLOORDIV:
                r = np.floor_divide(a, b)
            elif op == POW:
                r = np.power(a, b)
            else:
                raise ValueError(f"bad opcode {op}")
            stack.append(r.astype(np.int64))
    return (stack.pop() != 0).astype(np.uint8)


def _np_best_row(truth: np.ndarray, weights: np.ndarray, ok: np.ndarray, tol: float) -> int:
    if not ok.any():
        return -1
    score = weights @ truth.astype(np.float64)
    score = np.where(ok != 0, score, -np.inf)
    best = score.max()
    cand = np.flatnonzero(score >= best - tol)
    counts = truth[:, cand].sum(axis=0)
    cand = cand[counts == counts.max()]
    # lexicographically largest kept vector: walk facts in order
    for i in range(truth.shape[0]):
        if cand.size == 1:
            break
        col = truth[i, cand]
        if col.any():
            cand = cand[col != 0]
    return int(cand[0])


if USING_NUMBA:

    @njit(cache=True)
    def _nb_eval_program(code, values):  # pragma: no cover - compiled
        # opcode-at-a-time over blocks of rows, so the stack stays in cache
        m = values.shape[0]
        n = code.shape[0]
        depth = 1
        sp = 0
        for pc in range(n):
            op = code[pc, 0]
            if op == LOAD or op == CONST:
                sp += 1
            elif op == AND or op == OR:
                sp -= code[pc, 1] - 1
            elif op != NOT:
                sp -= 1
            depth = max(depth, sp)
        stack = np.empty((depth, _BLOCK), dtype=np.int64)
        out = np.empty(m, dtype=np.uint8)
        for lo in range(0, m, _BLOCK):
            k = min(_BLOCK, m - lo)
            sp = 0
            for pc in range(n):
                op = code[pc, 0]
                arg = code[pc, 1]
                if op == LOAD:
                    t = stack[sp]
                    for r in range(k):
                        t[r] = values[lo + r, arg]
                    sp += 1
                elif op == CONST:
                    t = stack[sp]
                    for r in range(k):
                        t[r] = arg
                    sp += 1
                elif op == NOT:
                    t = stack[sp - 1]
                    for r in range(k):
                        t[r] = 1 if t[r] == 0 else 0
                elif op == AND or op == OR:
                    base = sp - arg
                    acc = stack[base]
                    for r in range(k):
                        acc[r] = 1 if acc[r] != 0 else 0
                    for j in range(base + 1, sp):
                        t = stack[j]
                        if op == AND:
                            for r in range(k):
                                if t[r] == 0:
                                    acc[r] = 0
                        else:
                            for r in range(k):
                                if t[r] != 0:
                                    acc[r] = 1
                    sp = base + 1
                else:
                    a = stack[sp - 2]
                    b = stack[sp - 1]
                    if op == IMP:
                        for r in range(k):
                            a[r] = 1 if (a[r] == 0 or b[r] != 0) else 0
                    elif op == IFF:
                        for r in range(k):
                            a[r] = 1 if ((a[r] != 0) == (b[r] != 0)) else 0
                    elif op == EQ:
                        for r in range(k):
                            a[r] = 1 if a[r] == b[r] else 0
                    elif op == NE:
                        for r in range(k):
                            a[r] = 1 if a[r] != b[r] else 0
                    elif op == LT:
                        for r in range(k):
                            a[r] = 1 if a[r] < b[r] else 0
                    elif op == GT:
                        for r in range(k):
                            a[r] = 1 if a[r] > b[r] else 0
                    elif op == LE:
                        for r in range(k):
                            a[r] = 1 if a[r] <= b[r] else 0
                    elif op == GE:
                        for r in range(k):
                            a[r] = 1 if a[r] >= b[r] else 0
                    elif op == ADD:
                        for r in range(k):
                            a[r] = a[r] + b[r]
                    elif op == SUB:
                        for r in range(k):
                            a[r] = a[r] - b[r]
                    elif op == MUL:
                        for r in range(k):
                            a[r] = a[r] * b[r]
                    elif op == FLOORDIV:
                        for r in range(k):
                            a[r] = a[r] // b[r] if b[r] != 0 else 0
                    elif op == POW:
                        for r in range(k):
                            x = 1
                            for _ in range(b[r]):
                                x *= a[r]
                            a[r] = x
                    sp -= 1
            top = stack[0]
            for r in range(k):
                out[lo + r] = 1 if top[r] != 0 else 0
        return out

    @njit(cache=True)
    def _nb_best_row(truth, weights, ok, tol):  # pragma: no cover - compiled
        f, m = truth.shape
        score = np.zeros(m)
        count = np.zeros(m, dtype=np.int64)
        for i in range(f):
            w = weights[i]
            row = truth[i]
            for r in range(m):
                if row[r] != 0:
                    score[r] += w
                    count[r] += 1
        best = -np.inf
        found = False
        for r in range(m):
            if ok[r] != 0 and (not found or score[r] > best):
                best = score[r]
                found = True
        if not found:
            return -1
        pick = -1
        pick_count = -1
        for r in range(m):
            if ok[r] == 0 or score[r] < best - tol:
                continue
            c = count[r]
            better = False
            if c > pick_count:
                better = True
            elif c == pick_count:
                for i in range(f):
                    if truth[i, r] != truth[i, pick]:
                        better = truth[i, r] > truth[i, pick]
                        break
            if better:
                pick = r
                pick_count = c
        return pick


def eval_program(code: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Truth of the program on every row of ``values`` as a uint8 vector."""
    code = np.ascontiguousarray(code, dtype=np.int64)
    values = np.asarray(values, dtype=np.int64)  # either layout; column-major is faster
    if USING_NUMBA:
        return _nb_eval_program(code, values)
    return _np_eval_program(code, values)


def best_row(truth: np.ndarray, weights: np.ndarray, ok: np.ndarray, tol: float = 1e-9) -> int:
    """Row maximising the kept weight, then the kept count, then the kept bit-vector.

    Returns -1 when no row is admissible.
    """
    truth = np.ascontiguousarray(truth, dtype=np.uint8)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    ok = np.ascontiguousarray(ok, dtype=np.uint8)
    if USING_NUMBA:
        return int(_nb_best_row(truth, weights, ok, tol))
    return _np_best_row(truth, weights, ok, tol)


def warm_up() -> None:
    """Trigger compilation so later timings measure steady-state work."""
    code = np.array([[LOAD, 0], [CONST, 1], [EQ, 0]], dtype=np.int64)
    vals = np.array([[0], [1]], dtype=np.int64)
    eval_program(code, vals)
    best_row(np.array([[1, 0]], dtype=np.uint8), np.array([1.0]), np.array([1, 1], dtype=np.uint8))
