"""Per-fact token traces recovered from chat-completion logprobs."""

from __future__ import annotations

import json
import math
import re
from typing import Callable, Mapping, Optional, Sequence

from ..weighted import TokenRecord

_TOKEN = re.compile(r"\w+|\s+|[^\w\s]")


def token_record(entry: Mapping) -> TokenRecord:
    """One logprobs entry; the top-k alternatives are renormalised into a distribution."""
    prob = math.exp(float(entry["logprob"]))
    prob = min(max(prob, 1e-300), 1.0)
    top = entry.get("top_logprobs") or []
    dist = None
    if top:
        raw: dict[str, float] = {}
        for alt in top:
            raw[alt["token"]] = raw.get(alt["token"], 0.0) + math.exp(float(alt["logprob"]))
        raw.setdefault(entry["token"], prob)
        total = sum(raw.values())
        if total > 0:
            dist = {k: v / total for k, v in raw.items()}
    return TokenRecord(entry["token"], prob, dist)


def fact_traces(content: str, logprobs: Optional[Sequence[Mapping]], forms: Sequence[str]) -> Optional[dict[int, list[TokenRecord]]]:
    """Tokens covering each fact's logical form, keyed by fact index.

    Forms are located in order in the raw response (JSON-escaped); a form
    that cannot be found gets no trace.  None when the provider sent no
    logprobs at all.
    """
    if not logprobs:
        return None
    spans = []
    pos = 0
    for entry in logprobs:
        tok = entry["token"]
        spans.append((pos, pos + len(tok)))
        pos += len(tok)
    text = "".join(e["token"] for e in logprobs)
    out: dict[int, list[TokenRecord]] = {}
    cursor = 0
    for i, form in enumerate(forms):
        needle = json.dumps(form, ensure_ascii=False)[1:-1]
        at = text.find(needle, cursor) if needle else -1
        if at < 0:
            continue
        end = at + len(needle)
        cursor = end
        toks = [token_record(logprobs[k]) for k, (a, b) in enumerate(spans) if a < end and b > at]
        if toks:
            out[i] = toks
    return out


def synthetic_logprobs(content: str, prob: Callable[[str, int], float] | float = 0.99) -> list[dict]:
    """Tokenise ``content`` crudely and attach probabilities (for fixtures and tests)."""
    out = []
    for k, m in enumerate(_TOKEN.finditer(content)):
        p = prob(m.group(), k) if callable(prob) else prob
        out.append({"token": m.group(), "logprob": math.log(p), "top_logprobs": []})
    return out
