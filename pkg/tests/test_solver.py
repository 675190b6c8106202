import pytest

from ssr.errors import BudgetExceeded, SortConflict
from ssr.lang import Atom, Compare, Implies, Not, Obj, parse_formula, parse_problem
from ssr.sanitizer import sanitize
from ssr.solver import (
    DenseEngine,
    SearchEngine,
    Sat,
    SolverConfig,
    Truth,
    Unsat,
    check_sat,
    dump_grounding,
    entail_boolean,
    evaluate,
    ground,
    make_engine,
    solve_numeric,
)
from ssr.weighted import WeightedFact

ENGINES = ("dense", "search")


def build(env, engine="auto", **cfg):
    prob = parse_problem(env)
    facts = sanitize(prob).facts.facts
    config = SolverConfig(engine=engine, **cfg)
    g = ground(prob, facts, domains=config.domains, bound=config.bound)
    return prob, g, make_engine(g, config)


def atom(name, obj):
    return Atom(name, (Obj(obj),))


@pytest.mark.parametrize("engine", ENGINES)
def test_fae_query_unsat(envelope, engine):
    _, g, e = build(envelope("fae"), engine)
    q = atom("Opaque", "Fae")
    assert isinstance(check_sat(e, None, [q]), Unsat)
    assert isinstance(check_sat(e, None, [Not(q)]), Sat)
    assert entail_boolean(e, q) == Truth.FALSE


def test_gary_unknown(envelope):
    _, g, e = build(envelope("gary"))
    assert isinstance(e, SearchEngine)  # 28 Boolean atoms
    assert entail_boolean(e, g.query[0]) == Truth.UNKNOWN


def test_forced_dense_refuses_huge_space(envelope):
    with pytest.raises(BudgetExceeded):
        build(envelope("gary"), "dense")


@pytest.mark.parametrize("engine", ENGINES)
def test_direct_membership(engine):
    _, g, e = build({"objects": ["Anne"], "facts": ["Happy(Anne)"], "query": "Happy(Anne)"}, engine)
    assert entail_boolean(e, g.query[0]) == Truth.TRUE


def test_empty_constraints_least_model():
    _, g, e = build({"objects": ["Anne"], "facts": [], "query": "Happy(Anne)"})
    assert g.constraints == ()
    assert g.table.atoms == (atom("Happy", "Anne"),)
    assert check_sat(e) == Sat({atom("Happy", "Anne"): False})


def test_raven_grounding(envelope):
    _, g, _ = build(envelope("raven"))
    pos = [a for a in g.table.atoms if a.name == "Pos"]
    assert len(pos) == 5
    assert all(g.table.domain(a) == (1, 2, 3, 4, 5) for a in pos)
    assert len(g.side_constraints) == 10
    assert len(g.fact_constraints) == 4
    assert len(g.groups) == 1 and len(g.groups[0]) == 5


@pytest.mark.parametrize("engine", ENGINES)
def test_raven_position(envelope, engine):
    _, _, e = build(envelope("raven"), engine)
    assert solve_numeric(e, atom("Pos", "raven")) == (4,)


def test_universal_grounds_to_one_constraint():
    _, g, _ = build({"objects": ["Fae"], "facts": ["forall x. Jompus(x) -> Zumpus(x)"], "query": "Zumpus(Fae)"})
    (c,) = g.constraints
    assert c.formula == Implies(atom("Jompus", "Fae"), atom("Zumpus", "Fae"))


@pytest.mark.parametrize("engine", ENGINES)
def test_ages(engine):
    env = {
        "objects": ["David", "Peter"],
        "facts": ["Age(David) = Age(Peter) + 3", "Age(David) - 10 = 2 * (Age(Peter) - 10)"],
        "query": "Age(Peter)",
    }
    _, _, e = build(env, engine, domains={"Age": tuple(range(51))})
    assert solve_numeric(e, atom("Age", "Peter")) == (13,)
    assert solve_numeric(e, atom("Age", "David")) == (16,)


def test_unconstrained_position():
    env = {"objects": ["a", "b", "c"], "larger_direction": "right", "facts": [], "query": ["Pos(a) = 1", "Pos(b) = 1"]}
    _, _, e = build(env)
    assert solve_numeric(e, atom("Pos", "a")) == (1, 2, 3)


def test_canonical_least_model():
    env = {"objects": ["a"], "facts": ["P(a) or Q(a)", "R(a) -> P(a)"], "query": "Q(a)"}
    for engine in ENGINES:
        _, g, e = build(env, engine)
        model = check_sat(e).model
        # P, Q, R in first-occurrence order; least is P=F, Q=T, R=F
        assert [model[a] for a in g.table.atoms] == [False, True, False]


def test_keep_restricts_facts():
    _, _, e = build({"objects": ["a"], "facts": ["P(a)", "not P(a)"], "query": "P(a)"})
    assert not check_sat(e)
    assert check_sat(e, [0])
    assert check_sat(e, [1])
    assert entail_boolean(e, atom("P", "a"), [1]) == Truth.FALSE


def test_evaluate_examples():
    j, z = atom("Jompus", "Fae"), atom("Zumpus", "Fae")
    assert evaluate({j: True, z: True}, Implies(j, z))
    a, b = atom("Pos", "a"), atom("Pos", "b")
    assert not evaluate({a: 1, b: 1}, Compare("!=", a, b))


def test_evaluate_raven_model(envelope):
    _, g, _ = build(envelope("raven"))
    model = {atom("Pos", k): v for k, v in {"cardinal": 1, "blue_jay": 3, "raven": 4, "robin": 5, "quail": 2}.items()}
    assert all(evaluate(model, c.formula) for c in g.constraints)


def test_division_by_zero_is_false():
    a = atom("N", "a")
    f = parse_formula("N(a) // (N(a) - N(a)) = 0")
    assert not evaluate({a: 3}, f)


def test_sort_conflict():
    prob = parse_problem({"objects": ["a"], "facts": ["Age(a) > 3", "Age(a)"], "query": "Age(a) > 1"})
    facts = [WeightedFact(f.index, "", f.formula) for f in prob.facts]
    with pytest.raises(SortConflict):
        ground(prob, facts)


def test_engine_selection():
    _, g, _ = build({"objects": ["a"], "facts": ["P(a)"], "query": "P(a)"})
    assert isinstance(make_engine(g), DenseEngine)
    assert isinstance(make_engine(g, SolverConfig(dense_limit=1)), SearchEngine)
    with pytest.raises(ValueError):
        make_engine(g, SolverConfig(engine="magic"))


def test_dump_grounding(envelope):
    _, g, _ = build(envelope("raven"))
    text = dump_grounding(g)
    assert "# Pos(raven) in [1, 2, 3, 4, 5]" in text
    assert "Pos(robin) > Pos(raven)" in text


def test_large_space_goes_to_search():
    objs = [f"o{i}" for i in range(30)]
    env = {"objects": objs, "facts": [f"P({o}) -> Q({o})" for o in objs] + ["P(o0)"], "query": "Q(o0)"}
    _, g, e = build(env)
    assert isinstance(e, SearchEngine)
    assert entail_boolean(e, g.query[0]) == Truth.TRUE
