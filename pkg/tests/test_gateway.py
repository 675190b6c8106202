import json
import math
from pathlib import Path

import pytest

from ssr.errors import FixtureMissing, GatewayError, MalformedEnvelope
from ssr.gateway import (
    Gateway,
    GatewayConfig,
    ScriptedTransport,
    build_transport,
    mock_gateway,
    parse_answer,
    parse_envelope,
    parse_yes_no,
)
from ssr.gateway import prompts
from ssr.gateway.traces import fact_traces, synthetic_logprobs
from ssr.gateway.transport import FixtureStore, RecordTransport, completion, fixture_key
from ssr.lang.problem import Schema
from ssr.weighted import entropy_weight

GOLDEN = Path(__file__).parent / "golden" / "prompts"


@pytest.mark.parametrize(
    "name, file",
    [("cot", "cot.txt"), ("direct", "direct.txt"), (Schema.DEDUCTION, "translate_deduction.txt"), (Schema.ORDERING, "translate_ordering.txt")],
)
def test_prompt_templates_byte_identical(name, file):
    assert prompts.template(name).encode("utf-8") == (GOLDEN / file).read_bytes()


def test_translation_prompt_fills_slots():
    text = prompts.translation_prompt("CTX-MARK", "Q-MARK", "deduction")
    assert "CTX-MARK" in text and "Q-MARK" in text and "{context}" not in text


def test_cot_messages_list_options():
    msgs = prompts.cot_messages("c", "q", [("A", "True"), ("B", "False")])
    assert msgs[0]["content"] == prompts.template("cot")
    assert msgs[-1]["content"].endswith("Options:\nA) True\nB) False")


def test_fixture_missing(tmp_path):
    with pytest.raises(FixtureMissing):
        mock_gateway(tmp_path).cot_fallback("c", "q")


def test_malformed_envelope_keeps_raw():
    gw = Gateway(ScriptedTransport(lambda k, m: "I cannot translate this."), GatewayConfig(mode="live"))
    with pytest.raises(MalformedEnvelope) as info:
        gw.translate("c", "q")
    assert info.value.raw == "I cannot translate this."


def test_parse_envelope_fenced():
    assert parse_envelope('```json\n{"facts": [], "query": "P(a)"}\n```') == {"facts": [], "query": "P(a)"}
    with pytest.raises(MalformedEnvelope):
        parse_envelope('{"facts": []}')
    with pytest.raises(MalformedEnvelope):
        parse_envelope('{"query": ')


def test_parse_answer():
    assert parse_answer("... so the answer is\n#### C") == "C"
    assert parse_answer("#### B first, then #### A") == "A"
    assert parse_answer("The answer is C.") is None


def test_parse_yes_no():
    assert parse_yes_no("Yes.")
    assert parse_yes_no(" yes ")
    assert not parse_yes_no("No")
    assert not parse_yes_no("Yes, probably")
    assert not parse_yes_no("It might be yes")


def test_build_transport_needs_fixtures_or_endpoint():
    with pytest.raises(GatewayError):
        build_transport(GatewayConfig(mode="live", endpoint=None))
    with pytest.raises(GatewayError):
        build_transport(GatewayConfig(mode="replay", fixtures=None))


def test_replay_is_deterministic(cases, replay):
    p = cases["raven"]
    first = replay.translate(p.context, p.question, p.schema)
    second = replay.translate(p.context, p.question, p.schema)
    assert first == second
    assert len(first.envelope["facts"]) == 4 and len(first.envelope["query"]) == 5


def test_fixture_key_is_content_hash():
    msgs = [{"role": "user", "content": "x"}]
    assert fixture_key("cot", msgs) == fixture_key("cot", json.loads(json.dumps(msgs)))
    assert fixture_key("cot", msgs) != fixture_key("direct", msgs)


def test_record_then_replay(tmp_path):
    live = ScriptedTransport(lambda k, m: "yes")
    rec = Gateway(RecordTransport(live, FixtureStore(tmp_path)), GatewayConfig(mode="record"))
    assert rec.verify_premise("P(a)", "c", "q")
    assert len(FixtureStore(tmp_path)) == 1
    assert mock_gateway(tmp_path).verify_premise("P(a)", "c", "q")
    with pytest.raises(FixtureMissing):
        mock_gateway(tmp_path).verify_premise("Q(a)", "c", "q")


def test_fact_traces_cover_forms():
    content = json.dumps({"objects": ["a"], "facts": [["A is p.", "P(a)"], ["A is q.", "Q(a)"]], "query": "Q(a)"})
    lp = synthetic_logprobs(content, lambda tok, k: 0.5 if tok == "Q" else 0.99)
    traces = fact_traces(content, lp, ["P(a)", "Q(a)"])
    assert set(traces) == {0, 1}
    assert "".join(t.token for t in traces[0]) == "P(a)"
    assert entropy_weight(traces[0]) > entropy_weight(traces[1])
    assert fact_traces(content, None, ["P(a)"]) is None
    assert fact_traces(content, lp, ["Missing(a)"]) == {}


def test_translate_weights_from_logprobs():
    content = json.dumps({"objects": ["a"], "facts": [["s", "P(a)"]], "query": "P(a)"})
    resp = completion(content, synthetic_logprobs(content, 0.9))
    gw = Gateway(ScriptedTransport(lambda k, m: resp), GatewayConfig(mode="live"))
    out = gw.translate("c", "q")
    assert entropy_weight(out.traces[0]) == pytest.approx(0.9)
    assert math.isclose(out.traces[0][0].prob, 0.9)
