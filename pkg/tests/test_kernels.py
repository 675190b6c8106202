"""The numba kernels and the numpy fallback must agree bit for bit."""

import json
import os
import random
import subprocess
import sys

import numpy as np
import pytest

from oracles import random_problem
from ssr import _kernels as K
from ssr.lang import parse_problem
from ssr.solver import ground
from ssr.solver.dense import assignment_matrix, lower
from ssr.weighted import WeightedFact

needs_numba = pytest.mark.skipif(not K.USING_NUMBA, reason="numba unavailable or disabled")


def _programs(n=200):
    for seed in range(n):
        rp = random_problem(random.Random(5000 + seed))
        prob = parse_problem(rp.envelope)
        facts = [WeightedFact(f.index, "", f.formula) for f in prob.facts]
        g = ground(prob, facts, domains=rp.domains)
        _, values = assignment_matrix(g.table.domains)
        bounds = [(min(map(int, d)), max(map(int, d))) for d in g.table.domains]
        for c in g.constraints:
            yield lower(c.formula, g.table.index, bounds), values


@needs_numba
def test_eval_program_parity():
    count = 0
    for code, values in _programs():
        a = K._np_eval_program(code, values)
        b = K._nb_eval_program(np.ascontiguousarray(code), np.ascontiguousarray(values))
        assert np.array_equal(a.astype(bool), b.astype(bool))
        count += 1
    assert count > 500


@needs_numba
def test_best_row_parity():
    rng = np.random.default_rng(3)
    for _ in range(300):
        n, m = rng.integers(1, 10), rng.integers(1, 200)
        truth = rng.integers(0, 2, size=(n, m), dtype=np.uint8)
        weights = rng.choice([0.5, 1.0, 0.25, 0.3], size=n)
        ok = rng.integers(0, 2, size=m, dtype=np.uint8)
        assert K._np_best_row(truth, weights, ok, 1e-9) == K._nb_best_row(truth, weights, ok, 1e-9)


def test_best_row_no_admissible_row():
    truth = np.ones((2, 3), dtype=np.uint8)
    assert K.best_row(truth, np.ones(2), np.zeros(3, dtype=np.uint8)) == -1


def test_best_row_prefers_weight_then_count():
    truth = np.array([[1, 0, 1], [0, 1, 1], [0, 1, 0]], dtype=np.uint8)
    # rows 1 and 2 both keep two facts; row 2 drops fact 2, the smaller drop vector
    assert K.best_row(truth, np.array([1.0, 1.0, 1.0]), np.ones(3, dtype=np.uint8)) == 2


_SCRIPT = """
import json
from ssr import _kernels
from ssr.bench.datasets import load_dataset
from ssr.bench.results import evaluate
from ssr.gateway import mock_gateway
import sys
cases, fixtures = sys.argv[1], sys.argv[2]
records = evaluate(load_dataset(cases, sample_size=None), mock_gateway(fixtures))
print(json.dumps({"numba": _kernels.USING_NUMBA, "records": [r.to_json() for r in records]}))
"""


def _run(disable: str):
    from conftest import CASES, FIXTURES

    env = dict(os.environ, SSR_DISABLE_NUMBA=disable)
    out = subprocess.run([sys.executable, "-c", _SCRIPT, str(CASES), str(FIXTURES)], env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout)


def test_env_switch_gives_identical_pipeline_results():
    plain = _run("1")
    assert plain["numba"] is False
    fast = _run("0")
    assert fast["records"] == plain["records"]
