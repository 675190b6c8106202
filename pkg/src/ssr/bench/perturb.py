"""Robustness perturbations: distractor insertion (+k) and premise damage (-k)."""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from ..errors import TooFewPremises
from ..lang.ast import Atom, Compare, ForAll, Implies, IntConst, Not
from ..lang.parser import parse_formula
from ..lang.printer import to_text
from .datasets import BenchProblem
from .synth import gold_label, nullary_form, sentence_for

_SPLIT = re.compile(r"(?<=[.!?])\s+")


@lru_cache(maxsize=None)
def pool() -> tuple[str, ...]:
    text = resources.files("ssr").joinpath("data", "perturbation_pool.json").read_text(encoding="utf-8")
    items = tuple(json.loads(text))
    assert len(items) == 20
    return items


@dataclass(frozen=True)
class PerturbSpec:
    strength: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.strength not in (-2, -1, 0, 1, 2):
            raise ValueError("strength must be in -2..+2")


def sentences(text: str) -> list[str]:
    return [s for s in _SPLIT.split(text.strip()) if s]


def remove_sentences(text: str, removed) -> str:
    """Undo insertions: drop each sentence together with one adjacent space."""
    for s in removed:
        if text.startswith(s + " "):
            text = text[len(s) + 1 :]
        elif f" {s} " in text:
            text = text.replace(f" {s} ", " ", 1)
        elif text.endswith(" " + s):
            text = text[: -len(s) - 1]
        elif text == s:
            text = ""
    return text


def _rng(problem: BenchProblem, spec: PerturbSpec) -> random.Random:
    return random.Random(f"{spec.seed}:{problem.id}:{spec.strength}")


def _insert(problem: BenchProblem, k: int, rng: random.Random) -> BenchProblem:
    sents = sentences(problem.context)
    chosen = rng.sample(pool(), k)
    env = _copy_env(problem.envelope)
    for s in chosen:
        at = rng.randint(0, len(sents))
        if env is not None:
            before = set(sents[:at])
            fi = sum(1 for f in env["facts"] if isinstance(f, list) and f[0] in before)
            env["facts"].insert(fi, [s, nullary_form(s)])
        sents.insert(at, s)
    meta = dict(problem.meta, inserted=list(chosen))
    return problem.with_text(" ".join(sents), envelope=env, meta=meta)


def _copy_env(env: Optional[dict]) -> Optional[dict]:
    return None if env is None else json.loads(json.dumps(env))


def modify_form(form: str, rng: random.Random, domain: Optional[range] = None) -> str:
    """Change one premise: rebind a numeric value, flip a comparison, or negate."""
    f = parse_formula(form)
    if isinstance(f, Compare) and f.op == "=" and isinstance(f.lhs, Atom) and isinstance(f.rhs, IntConst):
        values = [v for v in (domain or range(1, 6)) if v != f.rhs.value]
        return to_text(Compare("=", f.lhs, IntConst(rng.choice(values))))
    if isinstance(f, Compare) and f.op in ("<", ">"):
        return to_text(Compare(">" if f.op == "<" else "<", f.lhs, f.rhs))
    if isinstance(f, ForAll) and isinstance(f.body, Implies):
        rhs = f.body.rhs
        new = rhs.arg if isinstance(rhs, Not) else Not(rhs)
        return to_text(ForAll(f.var, Implies(f.body.lhs, new)))
    return to_text(f.arg if isinstance(f, Not) else Not(f))


_NEG = ((" is not ", " is "), (" are not ", " are "), (" does not ", " "), (" is ", " is not "), (" are ", " are not "))


def negate_sentence(sentence: str) -> Optional[str]:
    for old, new in _NEG:
        if old in sentence:
            return sentence.replace(old, new, 1)
    return None


def _damage(problem: BenchProblem, k: int, rng: random.Random) -> BenchProblem:
    inserted = set(problem.meta.get("inserted", ()))
    env = _copy_env(problem.envelope)
    sents = sentences(problem.context)
    if env is not None:
        premises = [i for i, f in enumerate(env["facts"]) if f[0] not in inserted]
    else:
        premises = [i for i, s in enumerate(sents) if s not in inserted]
    if len(premises) <= k:
        raise TooFewPremises(f"{problem.id} has {len(premises)} premises, cannot damage {k}")
    targets = rng.sample(premises, k)
    changes = []
    drop: set[int] = set()
    for i in targets:
        delete = rng.random() < 0.5
        if env is not None:
            sentence, form = env["facts"][i]
            if delete:
                drop.add(i)
                changes.append({"op": "delete", "sentence": sentence})
                continue
            n = len(env.get("objects", [])) or 5
            new_form = modify_form(form, rng, range(1, n + 1))
            nouns = set(problem.meta.get("nouns", ()))
            new_sentence = sentence_for(new_form, nouns, n)
            env["facts"][i] = [new_sentence, new_form]
            sents = [new_sentence if s == sentence else s for s in sents]
            changes.append({"op": "modify", "sentence": sentence, "to": new_sentence})
        else:
            sentence = sents[i]
            neg = None if delete else negate_sentence(sentence)
            if neg is None:
                drop.add(i)
                changes.append({"op": "delete", "sentence": sentence})
            else:
                sents[i] = neg
                changes.append({"op": "modify", "sentence": sentence, "to": neg})
    if env is not None:
        gone = {env["facts"][i][0] for i in drop}
        env["facts"] = [f for i, f in enumerate(env["facts"]) if i not in drop]
        sents = [s for s in sents if s not in gone]
    else:
        sents = [s for i, s in enumerate(sents) if i not in drop]
    meta = dict(problem.meta, damaged=changes)
    gold = problem.gold_label
    if env is not None:
        new = gold_label(env)
        meta["gold_recomputed"] = new is not None and new in problem.labels
        if meta["gold_recomputed"]:
            gold = new
    return problem.with_text(" ".join(sents), envelope=env, meta=meta, gold_label=gold)


def perturb(problem: BenchProblem, spec: PerturbSpec) -> BenchProblem:
    if spec.strength == 0:
        return problem
    rng = _rng(problem, spec)
    if spec.strength > 0:
        return _insert(problem, spec.strength, rng)
    return _damage(problem, -spec.strength, rng)
