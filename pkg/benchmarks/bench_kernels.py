#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallback.

Runs itself twice in subprocesses, once with SSR_DISABLE_NUMBA=1, because the
backend is chosen at import time.  Workloads:

* dense evaluation of every ordering constraint of a 7-object puzzle
  (7^7 = 823543 rows), short three-opcode programs;
* one long program over the same rows: pairwise distinctness of all seven
  positions as a single conjunction (64 opcodes);
* max-weight row selection over a random 0/1 truth matrix;
* the full soft solve of a 6-object ordering puzzle (dense engine).

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, repeat: int) -> float:
    fn()  # compile / warm caches
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def _ordering_env(n: int) -> dict:
    objs = [f"o{i}" for i in range(n)]
    facts = [f"Pos({a}) < Pos({b})" for a, b in zip(objs, objs[1:]) if int(a[1:]) % 2 == 0]
    facts.append(f"Pos({objs[-1]}) = {n}")
    return {"objects": objs, "larger_direction": "right", "facts": facts, "query": f"Pos({objs[0]}) = 1"}


def worker(repeat: int) -> dict:
    import numpy as np

    from ssr import _kernels as K
    from ssr.lang import parse_formula, parse_problem
    from ssr.sanitizer import sanitize
    from ssr.soft import soft_solve
    from ssr.solver import SolverConfig, ground
    from ssr.solver.dense import assignment_matrix, lower

    prob = parse_problem(_ordering_env(7))
    facts = sanitize(prob).facts.facts
    g = ground(prob, facts)
    _, values = assignment_matrix(g.table.domains)
    bounds = [(min(d), max(d)) for d in g.table.domains]
    programs = [lower(c.formula, g.table.index, bounds) for c in g.constraints]

    def evaluate():
        for code in programs:
            K.eval_program(code, values)

    objs = prob.objects
    pairs = [f"Pos({a}) != Pos({b})" for i, a in enumerate(objs) for b in objs[i + 1 :]]
    wide = lower(parse_formula(" and ".join(pairs)), g.table.index, bounds)

    rng = np.random.default_rng(0)
    truth = rng.integers(0, 2, size=(12, 2_000_000), dtype=np.uint8)
    weights = rng.choice([0.25, 0.5, 1.0], size=12)
    ok = np.ones(truth.shape[1], dtype=np.uint8)

    small = parse_problem(_ordering_env(6))
    small_facts = sanitize(small).facts.facts
    cfg = SolverConfig(engine="dense")

    return {
        "numba": K.USING_NUMBA,
        "rows": int(values.shape[0]),
        "constraints": len(programs),
        "eval_program": _time(evaluate, repeat),
        "eval_long": _time(lambda: K.eval_program(wide, values), repeat),
        "best_row": _time(lambda: K.best_row(truth, weights, ok), repeat),
        "soft_solve": _time(lambda: soft_solve(small, small_facts, config=cfg), repeat),
    }


def main() -> int:
    ap = argparse.ArgumentParser(description="numba vs numpy kernel timings")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        print(json.dumps(worker(args.repeat)))
        return 0
    results = {}
    for label, flag in (("numpy", "1"), ("numba", "0")):
        env = dict(os.environ, SSR_DISABLE_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, __file__, "--worker", "--repeat", str(args.repeat)],
            env=env, capture_output=True, text=True, check=True,
        )
        results[label] = json.loads(out.stdout)
    plain, fast = results["numpy"], results["numba"]
    if not fast["numba"]:
        print("numba is not importable; both runs used numpy")
    print(f"{plain['rows']} rows, {plain['constraints']} constraints, best of {args.repeat}")
    print(f"{'kernel':<14}{'numpy (s)':>12}{'numba (s)':>12}{'speed-up':>10}")
    for key in ("eval_program", "eval_long", "best_row", "soft_solve"):
        a, b = plain[key], fast[key]
        print(f"{key:<14}{a:>12.4f}{b:>12.4f}{a / b:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
