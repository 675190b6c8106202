import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssr.errors import EmptyTrace, SideUnsat
from ssr.lang import parse_problem
from ssr.sanitizer import sanitize
from ssr.soft import (
    BooleanVerdict,
    FallbackVerdict,
    OptionVerdict,
    ValueSetVerdict,
    apply_weights,
    hard_solve,
    max_weight_sat_subset,
    prepare,
    soft_solve,
    verdict_from_json,
)
from ssr.solver import SolverConfig, Truth
from ssr.weighted import TokenRecord, WeightedFact, entropy_weight


def weighted(env, weights):
    prob = parse_problem(env)
    facts = [f.with_weight(w) for f, w in zip(sanitize(prob).facts.facts, weights)]
    return prob, facts


# entropy weights


def test_certain_tokens_weigh_one():
    assert entropy_weight([TokenRecord("P", 1.0), TokenRecord("(", 1.0)]) == 1.0


def test_uniform_binary_tokens_weigh_half():
    trace = [TokenRecord(t, 0.5, {t: 0.5, "x": 0.5}) for t in "abcd"]
    assert entropy_weight(trace) == pytest.approx(0.5)


def test_surprisal_mode():
    w = entropy_weight([TokenRecord("a", 0.9), TokenRecord("b", 0.8)])
    assert w == pytest.approx(math.exp((math.log(0.9) + math.log(0.8)) / 2))
    assert w == pytest.approx(0.8485, abs=1e-4)


def test_empty_trace():
    with pytest.raises(EmptyTrace):
        entropy_weight([])
    assert entropy_weight([], uniform=True) == 1.0


def test_bad_probability():
    with pytest.raises(ValueError):
        entropy_weight([TokenRecord("a", 0.0)])


def test_apply_weights():
    facts = [WeightedFact(0, "", parse_problem({"facts": ["P(a)"], "query": "P(a)"}).facts[0].formula), WeightedFact(1, "", sanitize(parse_problem({"facts": ["junk words"], "query": "P(a)"})).facts.facts[0].formula)]
    out = apply_weights(facts, {0: [TokenRecord("a", 0.5)]})
    assert out[0].weight == pytest.approx(0.5)
    assert out[1].weight == 0.0
    assert [f.weight for f in apply_weights(facts, None)] == [1.0, 0.0]
    assert apply_weights(facts, {0: [TokenRecord("a", 0.5)]}, uniform=True)[0].weight == 1.0


# max-weight subset


@pytest.mark.parametrize("method", ["dense", "search"])
def test_pairwise_contradiction(method):
    prob, facts = weighted({"objects": ["a"], "facts": ["P(a)", "not P(a)"], "query": "P(a)"}, [1.0, 0.4])
    _, engine = prepare(prob, facts, SolverConfig(engine=method))
    res = max_weight_sat_subset(engine, facts, method=method)
    assert res.kept == {0} and res.dropped == {1} and res.total_weight == 1.0


@pytest.mark.parametrize("method", ["dense", "search"])
def test_drop_the_light_negation(method):
    env = {"objects": ["a"], "facts": ["P(a) -> Q(a)", "P(a)", "not Q(a)"], "query": "Q(a)"}
    prob, facts = weighted(env, [0.9, 0.9, 0.5])
    _, engine = prepare(prob, facts, SolverConfig(engine=method))
    res = max_weight_sat_subset(engine, facts, method=method)
    assert res.dropped == {2}
    assert res.total_weight == pytest.approx(1.8)


@pytest.mark.parametrize("method", ["dense", "search"])
def test_tie_goes_to_lower_index(method):
    prob, facts = weighted({"objects": ["a"], "facts": ["P(a)", "not P(a)"], "query": "P(a)"}, [1.0, 1.0])
    _, engine = prepare(prob, facts, SolverConfig(engine=method))
    assert max_weight_sat_subset(engine, facts, method=method).kept == {0}


@pytest.mark.parametrize("method", ["dense", "search"])
def test_tie_prefers_more_facts(method):
    # dropping {0} or {1, 2} both cost 1.0; the larger kept set wins
    env = {"objects": ["a"], "facts": ["not P(a)", "P(a) or Q(a)", "P(a) or R(a)", "not Q(a)", "not R(a)"], "query": "P(a)"}
    prob, facts = weighted(env, [1.0, 0.5, 0.5, 1.0, 1.0])
    _, engine = prepare(prob, facts, SolverConfig(engine=method))
    res = max_weight_sat_subset(engine, facts, method=method)
    assert res.dropped == {0}


def test_consistent_set_kept_whole():
    prob, facts = weighted({"objects": ["a"], "facts": ["P(a)", "Q(a)"], "query": "P(a)"}, [0.3, 0.2])
    _, engine = prepare(prob, facts)
    res = max_weight_sat_subset(engine, facts)
    assert res.dropped == frozenset() and res.total_weight == pytest.approx(0.5)


def test_side_unsat():
    env = {"objects": ["a", "b"], "larger_direction": "right", "facts": ["Pos(a) = 1"], "query": ["Pos(a) = 1", "Pos(b) = 1"]}
    prob, facts = weighted(env, [1.0])
    _, engine = prepare(prob, facts)
    from ssr.lang import parse_formula

    with pytest.raises(SideUnsat):
        max_weight_sat_subset(engine, facts, [parse_formula("Pos(a) = Pos(b)")])


# soft_solve cases


def test_fae_case_one(envelope):
    prob = parse_problem(envelope("fae"))
    rep = soft_solve(prob, sanitize(prob).facts)
    assert rep.case == "I"
    assert rep.verdict == BooleanVerdict(Truth.FALSE)
    assert rep.sat_flags == (False, True)
    assert not rep.restored


def test_raven_case_one(envelope):
    prob = parse_problem(envelope("raven"))
    rep = soft_solve(prob, sanitize(prob).facts)
    assert rep.case == "I" and rep.verdict == OptionVerdict("E")


def test_djokovic_case_three_without_retrieval(envelope):
    prob = parse_problem(envelope("djokovic"))
    rep = soft_solve(prob, sanitize(prob).facts)
    assert rep.case == "III"
    assert rep.verdict == BooleanVerdict(Truth.UNKNOWN)


def test_restoration_drops_light_fact():
    env = {"objects": ["a"], "facts": ["P(a)", "P(a) -> Q(a)", "not Q(a)"], "query": "Q(a)"}
    prob, facts = weighted(env, [1.0, 1.0, 0.2])
    rep = soft_solve(prob, facts)
    assert rep.restored and rep.dropped == (2,)
    assert rep.verdict == BooleanVerdict(Truth.TRUE)
    assert hard_solve(prob, facts) == FallbackVerdict("inconsistent facts")


def test_case_two_picks_heavier_candidate():
    # the facts rule out both options; B costs the lighter fact
    env = {
        "objects": ["a", "b", "c"],
        "larger_direction": "right",
        "facts": ["Pos(a) = 1", "Pos(b) = 2"],
        "query": {"A": "Pos(a) = 2", "B": "Pos(b) = 3"},
    }
    prob, facts = weighted(env, [0.9, 0.3])
    rep = soft_solve(prob, facts)
    assert rep.case == "II" and not rep.restored
    assert rep.sat_flags == (False, False)
    assert rep.candidate_weights == pytest.approx((0.0, 0.9))  # A clashes with both facts
    assert rep.verdict == OptionVerdict("B")


def test_free_numeric_value_set():
    env = {"objects": ["Peter"], "facts": ["Age(Peter) > 2", "Age(Peter) < 5"], "query": "Age(Peter)"}
    prob = parse_problem(env)
    rep = soft_solve(prob, sanitize(prob).facts, config=SolverConfig(domains={"Age": tuple(range(10))}))
    assert rep.verdict == ValueSetVerdict((3, 4))


def test_hard_matches_soft_when_consistent(envelope):
    for case in ("fae", "turkey", "raven", "hawk"):
        prob = parse_problem(envelope(case))
        facts = sanitize(prob).facts
        assert soft_solve(prob, facts).verdict == hard_solve(prob, facts), case


def test_ambiguous_options_fall_back():
    env = {"objects": ["a", "b"], "larger_direction": "right", "facts": [], "query": {"A": "Pos(a) = 1", "B": "Pos(b) = 1"}}
    prob = parse_problem(env)
    rep = soft_solve(prob, sanitize(prob).facts)
    assert rep.case == "III" and rep.verdict == FallbackVerdict("ambiguous options")


def test_verdict_json_round_trip():
    for v in (BooleanVerdict(Truth.TRUE), OptionVerdict("C"), ValueSetVerdict((1, 2)), FallbackVerdict("x")):
        assert verdict_from_json(v.to_json()) == v


# raising a weight never lowers the optimum (the kept weight is monotone)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_weight_monotonicity(seed):
    rng = random.Random(seed)
    pool = ["P(a)", "not P(a)", "Q(a)", "not Q(a)", "P(a) -> Q(a)", "Q(a) -> not P(a)", "P(a) or Q(a)"]
    texts = [rng.choice(pool) for _ in range(rng.randint(2, 7))]
    weights = [rng.choice([0.2, 0.5, 1.0]) for _ in texts]
    prob, facts = weighted({"objects": ["a"], "facts": texts, "query": "P(a)"}, weights)
    _, engine = prepare(prob, facts)
    base = max_weight_sat_subset(engine, facts)
    i = rng.randrange(len(facts))
    bumped = [f.with_weight(f.weight + 0.5) if f.index == i else f for f in facts]
    after = max_weight_sat_subset(engine, bumped)
    assert after.total_weight >= base.total_weight - 1e-12
    if i in base.kept:
        assert i in after.kept
