from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import EmptyTrace
from .lang.ast import BoolVal, Formula

PLACEHOLDER = BoolVal(True)


@dataclass(frozen=True)
class WeightedFact:
    index: int
    sentence: str
    formula: Formula
    weight: float = 1.0

    @property
    def is_placeholder(self) -> bool:
        return self.formula == PLACEHOLDER

    def with_weight(self, weight: float) -> "WeightedFact":
        return replace(self, weight=weight)


@dataclass(frozen=True)
class TokenRecord:
    """One generated token: its text, its probability, optionally the full distribution."""

    token: str
    prob: float
    dist: Mapping[str, float] | None = None

    def to_json(self) -> dict:
        out: dict = {"token": self.token, "prob": self.prob}
        if self.dist is not None:
            out["dist"] = dict(self.dist)
        return out

    @classmethod
    def from_json(cls, doc: Mapping) -> "TokenRecord":
        return cls(doc["token"], float(doc["prob"]), doc.get("dist"))


def token_entropy(rec: TokenRecord) -> float:
    if rec.dist:
        return -sum(p * math.log(p) for p in rec.dist.values() if p > 0)
    if not 0 < rec.prob <= 1:
        raise ValueError(f"token probability {rec.prob} outside (0, 1]")
    return -math.log(rec.prob)


def entropy_weight(trace: Sequence[TokenRecord], *, uniform: bool = False) -> float:
    """exp(-H) with H the mean per-token entropy of the fact's tokens.

    Tokens with a full distribution contribute its Shannon entropy, the rest
    the surprisal of the chosen token.  ``uniform`` ignores the trace.
    """
    if uniform:
        return 1.0
    if not trace:
        raise EmptyTrace("no tokens recorded for this fact")
    h = sum(token_entropy(r) for r in trace) / len(trace)
    return math.exp(-max(h, 0.0))
