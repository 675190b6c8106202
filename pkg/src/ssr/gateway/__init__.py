"""Single entry point for LLM calls: translation, premise checks, CoT fallback, rendering."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from ..errors import GatewayError, MalformedEnvelope, NetworkError
from ..lang.problem import Schema
from ..weighted import TokenRecord
from . import prompts
from .traces import fact_traces, synthetic_logprobs, token_record
from .transport import (
    FixtureStore,
    HTTPTransport,
    RecordTransport,
    ReplayTransport,
    ScriptedTransport,
    Transport,
    completion,
    fixture_key,
)

MAX_TOKENS = 1000
_ANSWER = re.compile(r"####\s*([A-Z])\b")
_FENCE = re.compile(r"^```(?:json)?\s*|\s*```$")


@dataclass
class GatewayConfig:
    endpoint: Optional[str] = None
    model: str = "default"
    api_key: Optional[str] = None
    max_tokens: int = MAX_TOKENS
    temperature: float = 0.0
    fixtures: Optional[str] = None
    mode: str = "replay"  # live | record | replay
    max_in_flight: int = 4
    logprobs: bool = True
    top_logprobs: int = 5

    @classmethod
    def from_env(cls, **overrides) -> "GatewayConfig":
        env = os.environ
        cfg = cls(
            endpoint=env.get("SSR_LLM_ENDPOINT"),
            model=env.get("SSR_LLM_MODEL", "default"),
            api_key=env.get("SSR_LLM_API_KEY"),
            fixtures=env.get("SSR_FIXTURES"),
            mode=env.get("SSR_GATEWAY_MODE", "replay"),
        )
        for k, v in overrides.items():
            if v is not None:
                setattr(cfg, k, v)
        return cfg


@dataclass(frozen=True)
class TranslationResult:
    envelope: dict
    traces: Optional[dict[int, list[TokenRecord]]]
    raw_response: str


@dataclass(frozen=True)
class CoTAnswer:
    label: Optional[str]
    text: str


def build_transport(cfg: GatewayConfig) -> Transport:
    if cfg.mode == "replay":
        if not cfg.fixtures:
            raise GatewayError("replay mode needs a fixture directory")
        return ReplayTransport(FixtureStore(cfg.fixtures))
    if not cfg.endpoint:
        raise GatewayError(f"{cfg.mode} mode needs an endpoint (SSR_LLM_ENDPOINT)")
    live = HTTPTransport(cfg.endpoint, cfg.api_key, max_in_flight=cfg.max_in_flight)
    if cfg.mode == "live":
        return live
    if cfg.mode == "record":
        if not cfg.fixtures:
            raise GatewayError("record mode needs a fixture directory")
        return RecordTransport(live, FixtureStore(cfg.fixtures))
    raise GatewayError(f"unknown gateway mode {cfg.mode!r}")


def _content(resp: Mapping) -> tuple[str, Optional[list]]:
    try:
        choice = resp["choices"][0]
        text = choice["message"]["content"] or ""
    except (KeyError, IndexError, TypeError) as exc:
        raise NetworkError("response has no message content") from exc
    lp = choice.get("logprobs") or {}
    return text, (lp.get("content") if isinstance(lp, Mapping) else None)


def parse_envelope(raw: str) -> dict:
    text = _FENCE.sub("", raw.strip())
    start, end = text.find("{"), text.rfind("}")
    if start < 0 or end <= start:
        raise MalformedEnvelope("no JSON object in the response", raw)
    try:
        doc = json.loads(text[start : end + 1])
    except json.JSONDecodeError as exc:
        raise MalformedEnvelope(f"response JSON is invalid: {exc.msg}", raw) from None
    if not isinstance(doc, dict) or "query" not in doc:
        raise MalformedEnvelope("envelope lacks a query", raw)
    return doc


def parse_answer(text: str) -> Optional[str]:
    found = _ANSWER.findall(text)
    return found[-1] if found else None


def parse_yes_no(text: str) -> bool:
    word = text.strip().strip(".!").strip().lower()
    return word == "yes"


class Gateway:
    def __init__(self, transport: Transport, config: Optional[GatewayConfig] = None) -> None:
        self.transport = transport
        self.config = config or GatewayConfig()

    @classmethod
    def from_config(cls, cfg: GatewayConfig) -> "Gateway":
        return cls(build_transport(cfg), cfg)

    def _body(self, messages: list, *, logprobs: bool = False) -> dict:
        body = {
            "model": self.config.model,
            "messages": messages,
            "max_tokens": self.config.max_tokens,
            "temperature": self.config.temperature,
        }
        if logprobs and self.config.logprobs:
            body["logprobs"] = True
            body["top_logprobs"] = self.config.top_logprobs
        return body

    def _call(self, kind: str, messages: list, *, logprobs: bool = False) -> tuple[str, Optional[list]]:
        return _content(self.transport.send(kind, self._body(messages, logprobs=logprobs)))

    def translate(self, context: str, question: str, schema: Schema | str = Schema.DEDUCTION) -> TranslationResult:
        text, lp = self._call("translate", prompts.translate_messages(context, question, schema), logprobs=True)
        env = parse_envelope(text)
        forms = []
        for entry in env.get("facts", []) if isinstance(env.get("facts"), list) else []:
            if isinstance(entry, list) and len(entry) == 2:
                forms.append(str(entry[1]))
            else:
                forms.append(str(entry))
        return TranslationResult(env, fact_traces(text, lp, forms), text)

    def verify_premise(self, assignment: str, context: str, question: str) -> bool:
        text, _ = self._call("verify", prompts.verify_messages(assignment, context, question))
        return parse_yes_no(text)

    def cot_fallback(self, context: str, question: str, options=None) -> CoTAnswer:
        text, _ = self._call("cot", prompts.cot_messages(context, question, options))
        return CoTAnswer(parse_answer(text), text)

    def direct(self, context: str, question: str, options=None) -> CoTAnswer:
        text, _ = self._call("direct", prompts.direct_messages(context, question, options))
        return CoTAnswer(parse_answer(text), text)

    def render(self, listing: str) -> str:
        text, _ = self._call("render", prompts.render_messages(listing))
        return text.strip()


def mock_gateway(fixtures: str | os.PathLike) -> Gateway:
    """Replay-only gateway over a fixture directory."""
    cfg = GatewayConfig(fixtures=str(fixtures), mode="replay")
    return Gateway(ReplayTransport(FixtureStore(Path(fixtures))), cfg)


__all__ = [
    "CoTAnswer",
    "FixtureStore",
    "Gateway",
    "GatewayConfig",
    "HTTPTransport",
    "MAX_TOKENS",
    "RecordTransport",
    "ReplayTransport",
    "ScriptedTransport",
    "TranslationResult",
    "build_transport",
    "completion",
    "fact_traces",
    "fixture_key",
    "mock_gateway",
    "parse_answer",
    "parse_envelope",
    "parse_yes_no",
    "prompts",
    "synthetic_logprobs",
    "token_record",
]
