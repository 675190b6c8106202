import dataclasses

import pytest

from ssr.chains import (
    Chain,
    Literal,
    NoChain,
    Pass,
    chain_from_json,
    chain_to_json,
    generate,
    prepare_theory,
    query_as_rule,
    render_chain,
    symbolic_listing,
    verdict_answer,
    verify_chain,
    verify_document,
)
from ssr.errors import GatewayUnavailable
from ssr.lang import Atom, Obj, parse_formula, parse_problem
from ssr.sanitizer import sanitize
from ssr.soft import prepare, soft_solve


def theory_of(env):
    prob = parse_problem(env)
    facts = sanitize(prob).facts.facts
    g, _ = prepare(prob, facts)
    theory, targets = prepare_theory(prob, g)
    return prob, g, theory, targets, soft_solve(prob, facts).verdict


def lit(name, obj, value=True):
    return Literal(Atom(name, (Obj(obj),)), value)


def test_normalize_fae(envelope):
    _, _, th, _, _ = theory_of(envelope("fae"))
    assert th.properties == (lit("Jompus", "Fae"),)
    assert len(th.rules) == 12 and not th.residual


def test_normalize_turkey_disjunction(envelope):
    _, _, th, _, _ = theory_of(envelope("turkey"))
    assert max(len(r.conclusions) for r in th.rules) == 6


def test_normalize_comparisons_are_residual(envelope):
    _, _, th, _, _ = theory_of(envelope("raven"))
    assert not th.rules and len(th.residual) == 12
    assert len(th.groups) == 1


@pytest.mark.parametrize("direction", ["forward", "backward"])
def test_fae_chain(envelope, direction):
    prob, g, th, targets, verdict = theory_of(envelope("fae"))
    chain = generate(prob, g, direction=direction)[direction]
    assert isinstance(chain, Chain) and chain.answer == "False"
    assert [s.via for s in chain.steps] == ["given"] + ["rule"] * 5
    assert chain.steps[-1].derived == lit("Opaque", "Fae", False)
    assert verify_chain(chain, th, targets, verdict_answer(verdict)) == Pass()


def test_fae_render(envelope):
    prob, g, th, _, _ = theory_of(envelope("fae"))
    text = render_chain(generate(prob, g, direction="forward")["forward"], theory=th)
    assert text.splitlines()[0] == "1. Since Fae is a jompus, Fae is a zumpus."
    assert text.splitlines()[-1] == "5. Since Fae is a wumpus, Fae is not opaque."


def test_raven_forward(envelope):
    prob, g, th, targets, verdict = theory_of(envelope("raven"))
    chain = generate(prob, g, direction="forward")["forward"]
    assert chain.answer == "E"
    assert Literal(Atom("Pos", (Obj("raven"),)), 4) in chain.supports
    assert verify_chain(chain, th, targets, "E")
    assert render_chain(chain, theory=th).endswith("the raven is in position 4.")


def test_raven_backward_uses_elimination(envelope):
    prob, g, th, targets, _ = theory_of(envelope("raven"))
    chain = generate(prob, g, direction="backward")["backward"]
    assert "elimination" in chain.tags
    assert verify_chain(chain, th, targets, "E")


def test_gary_no_chain(envelope):
    prob, g, _, _, _ = theory_of(envelope("gary"))
    out = generate(prob, g)
    assert out["forward"] == NoChain("forward", "fixpoint")
    assert out["backward"] == NoChain("backward", "cycle")


def test_hawk_chain_contradicts_gold(envelope, cases):
    prob, g, th, targets, verdict = theory_of(envelope("hawk"))
    chain = generate(prob, g, direction="forward")["forward"]
    assert verify_chain(chain, th, targets, verdict_answer(verdict))
    assert cases["hawk"].gold_label != chain.answer
    assert not verify_chain(chain, th, targets, cases["hawk"].gold_label)


def test_tampered_step_fails(envelope):
    prob, g, th, targets, _ = theory_of(envelope("fae"))
    chain = generate(prob, g, direction="forward")["forward"]
    steps = list(chain.steps)
    steps[2] = dataclasses.replace(steps[2], derived=lit("Numpus", "Fae", False))
    bad = dataclasses.replace(chain, steps=tuple(steps))
    res = verify_chain(bad, th, targets, "False")
    assert not res and res.step is not None


def test_query_as_rule():
    lits, rhs = query_as_rule(parse_formula("P(a) and not Q(a) -> R(a)"))
    assert lits == [lit("P", "a"), lit("Q", "a", False)]
    assert rhs == Atom("R", (Obj("a"),))
    f = parse_formula("(P(a) or Q(a)) -> R(a)")
    assert query_as_rule(f) == ([], f)


def test_implication_query_assumes_premise():
    env = {"objects": ["a"], "facts": ["forall x. P(x) -> Q(x)"], "query": "P(a) -> Q(a)"}
    prob, g, th, targets, _ = theory_of(env)
    assert th.assumptions == (lit("P", "a"),)
    chain = generate(prob, g, direction="forward")["forward"]
    assert chain.answer == "True" and verify_chain(chain, th, targets, "True")


def test_stated_query_is_one_step():
    prob, g, th, targets, _ = theory_of({"objects": ["a"], "facts": ["P(a)"], "query": "P(a)"})
    chain = generate(prob, g, direction="forward")["forward"]
    assert len(chain.steps) == 1 and chain.steps[0].via == "given"
    assert render_chain(chain, theory=th).endswith("as stated.")


def test_serialize_round_trip(envelope):
    for case in ("fae", "raven", "turkey"):
        prob, g, th, targets, verdict = theory_of(envelope(case))
        for chain in generate(prob, g).values():
            doc = chain_to_json(chain, prob, expected=verdict_answer(verdict))
            assert chain_from_json(doc) == chain
            if isinstance(chain, Chain):
                assert verify_document(doc) == Pass()


def test_verify_document_rejects_wrong_answer(envelope):
    prob, g, _, _, _ = theory_of(envelope("fae"))
    doc = chain_to_json(generate(prob, g, direction="forward")["forward"], prob, expected="True")
    assert not verify_document(doc)


def test_empty_chain_renders_nothing():
    assert render_chain(NoChain("forward", "fixpoint")) == ""
    assert render_chain(NoChain("forward", "fixpoint"), "gateway") == ""


def test_gateway_render_needs_gateway(envelope):
    prob, g, th, _, _ = theory_of(envelope("fae"))
    chain = generate(prob, g, direction="forward")["forward"]
    with pytest.raises(GatewayUnavailable):
        render_chain(chain, "gateway", theory=th)
    assert symbolic_listing(chain, th).splitlines()[-1] == "Answer: False"
