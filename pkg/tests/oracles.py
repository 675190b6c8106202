"""Brute-force reference implementations used by the oracle tests.

Nothing here calls into the solver.  Formulas are evaluated straight from
the parsed (ungrounded) AST, with quantifiers expanded over the object list
on the fly, against every row of the full assignment space held as numpy
columns.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from ssr.lang.ast import And, Arith, Atom, BoolVal, Compare, Exists, ForAll, Iff, Implies, IntConst, Not, Obj, Or, Var

BOOL_PREDS = ("Red", "Big", "Calm", "Wild", "Cold", "Kind")
NUM_PREDS = ("Age", "Rank", "Size")
OBJECTS = ("anne", "bob", "carl", "dave")
SPACE_CAP = 200_000


# -- random problems --------------------------------------------------------


@dataclass
class RandomProblem:
    envelope: dict
    domains: dict  # numeric predicate -> tuple of values
    numeric: tuple  # numeric predicate names in use


def _bool_fact(rng: random.Random, preds, objs) -> str:
    p, q = rng.choice(preds), rng.choice(preds)
    o, o2 = rng.choice(objs), rng.choice(objs)
    return rng.choice(
        [
            f"{p}({o})",
            f"not {p}({o})",
            f"forall x. {p}(x) -> {q}(x)",
            f"forall x. {p}(x) -> not {q}(x)",
            f"{p}({o}) or {q}({o2})",
            f"{p}({o}) and not {q}({o2})",
            f"{p}({o}) <-> {q}({o2})",
            f"exists x. {p}(x)",
            f"forall x. {p}(x) or {q}(x)",
        ]
    )


def _num_fact(rng: random.Random, preds, nums, domains, objs) -> str:
    n, m = rng.choice(nums), rng.choice(nums)
    p = rng.choice(preds)
    o, o2 = rng.choice(objs), rng.choice(objs)
    k = rng.choice(domains[n])
    return rng.choice(
        [
            f"{n}({o}) = {k}",
            f"{n}({o}) != {k}",
            f"{n}({o}) < {m}({o2})",
            f"{n}({o}) + {rng.randint(0, 2)} >= {m}({o2})",
            f"{n}({o}) - {m}({o2}) = {rng.randint(-1, 1)}",
            f"{p}({o}) -> {n}({o}) > {k}",
            f"forall x. {p}(x) -> {n}(x) <= {k}",
            f"2 * {n}({o}) != {m}({o2}) + 1",
        ]
    )


def random_problem(rng: random.Random) -> RandomProblem:
    """At most 4 objects, 6 predicates, numeric domains of at most 5 values."""
    while True:
        objs = list(OBJECTS[: rng.randint(1, 4)])
        n_num = rng.randint(0, 2)
        n_bool = rng.randint(1, 6 - n_num)
        preds = rng.sample(BOOL_PREDS, n_bool)
        nums = rng.sample(NUM_PREDS, n_num)
        domains = {}
        for n in nums:
            lo = rng.randint(0, 2)
            domains[n] = tuple(range(lo, lo + rng.randint(2, 5)))
        facts = []
        for _ in range(rng.randint(1, 6)):
            if nums and rng.random() < 0.4:
                facts.append(_num_fact(rng, preds, nums, domains, objs))
            else:
                facts.append(_bool_fact(rng, preds, objs))
        o = rng.choice(objs)
        query = rng.choice(
            [
                f"{rng.choice(preds)}({o})",
                f"not {rng.choice(preds)}({o})",
                f"{rng.choice(preds)}({o}) and {rng.choice(preds)}({rng.choice(objs)})",
            ]
            + ([f"{nums[0]}({o}) >= {domains[nums[0]][1]}"] if nums else [])
        )
        env = {"objects": objs, "facts": facts, "query": query}
        prob = RandomProblem(env, domains, tuple(nums))
        if space_size(universe(prob), prob.domains) <= SPACE_CAP:
            return prob


# -- evaluation ---------------------------------------------------------------


def _preds_in(f, acc: list) -> None:
    if isinstance(f, Atom):
        acc.append(f)
    elif isinstance(f, (Not,)):
        _preds_in(f.arg, acc)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            _preds_in(a, acc)
    elif isinstance(f, (Implies, Iff, Compare, Arith)):
        _preds_in(f.lhs, acc)
        _preds_in(f.rhs, acc)
    elif isinstance(f, (ForAll, Exists)):
        _preds_in(f.body, acc)


def universe(prob: RandomProblem, formulas=None) -> list[tuple[str, str]]:
    """Every (predicate, object) pair a formula can touch, in first-seen order."""
    from ssr.lang.parser import parse_formula

    if formulas is None:
        formulas = [parse_formula(t) for t in prob.envelope["facts"]] + [parse_formula(prob.envelope["query"])]
    objs = prob.envelope["objects"]
    seen: dict[tuple[str, str], None] = {}
    for f in formulas:
        atoms: list[Atom] = []
        _preds_in(f, atoms)
        for a in atoms:
            (arg,) = a.args
            names = objs if isinstance(arg, Var) else [arg.name]
            for o in names:
                seen.setdefault((a.name, o), None)
    return list(seen)


def space_size(keys, domains) -> int:
    size = 1
    for name, _ in keys:
        size *= len(domains.get(name, (0, 1)))
    return size


class Space:
    """All assignments over ``keys`` as columns (booleans as 0/1)."""

    def __init__(self, keys, domains, objects) -> None:
        self.keys = list(keys)
        self.objects = list(objects)
        self.domains = [tuple(domains.get(n, (0, 1))) for n, _ in self.keys]
        self.is_num = [n in domains for n, _ in self.keys]
        sizes = [len(d) for d in self.domains]
        self.rows = int(np.prod(sizes, dtype=np.int64)) if sizes else 1
        self.cols = {}
        stride = self.rows
        r = np.arange(self.rows, dtype=np.int64)
        # first key varies slowest, so row order is lexicographic order
        for key, dom, size in zip(self.keys, self.domains, sizes):
            stride //= size
            self.cols[key] = np.asarray(dom, dtype=np.int64)[(r // stride) % size]

    def _term(self, t, env) -> str:
        return env[t.name] if isinstance(t, Var) else t.name

    def _num(self, e, env):
        if isinstance(e, IntConst):
            return np.int64(e.value)
        if isinstance(e, Atom):
            return self.cols[(e.name, self._term(e.args[0], env))]
        if isinstance(e, Arith):
            a, b = self._num(e.lhs, env), self._num(e.rhs, env)
            if e.op == "+":
                return a + b
            if e.op == "-":
                return a - b
            if e.op == "*":
                return a * b
        raise NotImplementedError(e)

    def truth(self, f, env=None) -> np.ndarray:
        env = env or {}
        full = np.ones(self.rows, dtype=bool)
        if isinstance(f, Atom):
            return self.cols[(f.name, self._term(f.args[0], env))] == 1
        if isinstance(f, BoolVal):
            return full if f.value else ~full
        if isinstance(f, Not):
            return ~self.truth(f.arg, env)
        if isinstance(f, And):
            return np.logical_and.reduce([self.truth(a, env) for a in f.args])
        if isinstance(f, Or):
            return np.logical_or.reduce([self.truth(a, env) for a in f.args])
        if isinstance(f, Implies):
            return ~self.truth(f.lhs, env) | self.truth(f.rhs, env)
        if isinstance(f, Iff):
            return self.truth(f.lhs, env) == self.truth(f.rhs, env)
        if isinstance(f, Compare):
            a, b = self._num(f.lhs, env), self._num(f.rhs, env)
            op = {"<": np.less, ">": np.greater, "<=": np.less_equal, ">=": np.greater_equal, "=": np.equal, "!=": np.not_equal}
            return np.broadcast_to(op[f.op](a, b), (self.rows,))
        if isinstance(f, (ForAll, Exists)):
            parts = [self.truth(f.body, {**env, f.var: o}) for o in self.objects]
            if not parts:
                return full if isinstance(f, ForAll) else ~full
            return (np.logical_and if isinstance(f, ForAll) else np.logical_or).reduce(parts)
        raise NotImplementedError(f)

    def least(self, mask: np.ndarray, order: list[tuple[str, str]]):
        """Lexicographically least satisfying row projected on ``order``."""
        idx = np.flatnonzero(mask)
        if idx.size == 0:
            return None
        proj = np.stack([self.cols[k][idx] for k in order]) if order else np.zeros((0, idx.size), dtype=np.int64)
        if order:
            best = idx[np.lexsort(proj[::-1])[0]]
        else:
            best = idx[0]
        return tuple(int(self.cols[k][best]) for k in order)


# -- subset optimum ---------------------------------------------------------


def exhaustive_subset_optimum(truths: list[np.ndarray], side: np.ndarray, weights: list[float]) -> float:
    """Heaviest subset S (over all 2^n) such that some row satisfies side and all of S."""
    n = len(truths)
    bits = np.zeros(side.shape[0], dtype=np.int64)
    for i, t in enumerate(truths):
        bits |= t.astype(np.int64) << i
    rows = np.unique(bits[side])
    if rows.size == 0:
        raise ValueError("side constraints unsatisfiable")
    subsets = np.arange(1 << n, dtype=np.int64)
    # S is satisfiable iff S is contained in the fact set of some row
    ok = ((subsets[:, None] & ~rows[None, :]) == 0).any(axis=1)
    w = np.zeros(1 << n)
    for i, wi in enumerate(weights):
        w += ((subsets >> i) & 1) * wi
    return float(w[ok].max())


def random_subset_instance(rng: random.Random) -> tuple[dict, list[float]]:
    objs = list(OBJECTS[: rng.randint(1, 2)])
    preds = rng.sample(BOOL_PREDS, rng.randint(2, 4))
    n = rng.randint(2, 12)
    facts = []
    for _ in range(n):
        p, q, o = rng.choice(preds), rng.choice(preds), rng.choice(objs)
        facts.append(
            rng.choice(
                [
                    f"{p}({o})",
                    f"not {p}({o})",
                    f"{p}({o}) -> {q}({o})",
                    f"forall x. {p}(x) -> not {q}(x)",
                    f"{p}({o}) or {q}({o})",
                    f"not {p}({o}) and {q}({o})",
                ]
            )
        )
    if rng.random() < 0.3:
        weights = [rng.choice((0.5, 1.0)) for _ in facts]  # plenty of ties
    else:
        weights = [round(rng.uniform(0.05, 1.0), 3) for _ in facts]
    return {"objects": objs, "facts": facts, "query": f"{preds[0]}({objs[0]})"}, weights


def all_subsets(n: int):
    for r in range(n + 1):
        yield from itertools.combinations(range(n), r)
