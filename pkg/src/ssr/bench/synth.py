"""Synthetic problems with gold translations, checked by the solver when generated.

``ontology`` problems are hop chains over made-up class names with a
True/False target.  ``ordering`` problems are five-object permutation
puzzles whose clues admit exactly one arrangement.
"""

from __future__ import annotations

import itertools
import random
import re
from typing import Optional

from ..lang.ast import Atom, Compare, ForAll, Implies, IntConst, Not
from ..lang.parser import parse_formula
from ..lang.problem import POS, parse_problem
from .datasets import BenchProblem

CLASSES = (
    "wumpus", "jompus", "zumpus", "numpus", "yumpus", "tumpus", "impus", "dumpus", "rompus",
    "vumpus", "lempus", "grimpus", "gorpus", "shumpus", "sterpus", "brimpus", "lorpus", "yompus",
)
ADJECTIVES = (
    "opaque", "sweet", "hot", "large", "brown", "bright", "kind", "shy", "small", "metallic",
    "spicy", "orange", "red", "blue", "dull", "happy", "liquid", "wooden", "floral", "fruity",
)
NAMES = ("Fae", "Alex", "Sam", "Max", "Rex", "Polly", "Wren", "Stella", "Sally", "Hugo", "Ines", "Otto")

SCENES = (
    ("On a branch, there are five birds", ("cardinal", "robin", "blue jay", "quail", "raven", "hawk", "owl", "crow", "falcon", "hummingbird")),
    ("On a shelf, there are five books", ("red book", "green book", "blue book", "white book", "black book", "orange book", "gray book")),
    ("In an antique car show, there are five vehicles", ("sedan", "convertible", "truck", "bus", "minivan", "limousine", "tractor", "motorcycle")),
)
ORDINALS = ("first", "second", "third", "fourth", "fifth", "sixth", "seventh")

BOOLEAN_OPTIONS = (("A", "True"), ("B", "False"), ("C", "Unknown"))


def _pred(word: str) -> str:
    return word[:1].upper() + word[1:]


def _plural(noun: str) -> str:
    return noun + "es" if noun.endswith("s") else noun + "s"


def _a(noun: str) -> str:
    return ("an " if noun[:1] in "aeiou" else "a ") + noun


def _oid(name: str) -> str:
    return name.replace(" ", "_")


def _oname(oid: str) -> str:
    return oid.replace("_", " ")


# sentences are rendered from formulas so a perturbed form gets a matching sentence


def sentence_for(form: str, nouns: set[str], n_objects: int = 5) -> str:
    f = parse_formula(form)
    if isinstance(f, ForAll) and isinstance(f.body, Implies) and isinstance(f.body.lhs, Atom):
        a = f.body.lhs.name.lower()
        rhs = f.body.rhs
        neg = isinstance(rhs, Not)
        b = (rhs.arg if neg else rhs).name
        word = b.lower()
        if b in nouns:
            return f"Every {a} is {'not ' if neg else ''}{_a(word)}."
        return f"{_plural(a).capitalize()} are {'not ' if neg else ''}{word}."
    if isinstance(f, (Atom, Not)):
        neg = isinstance(f, Not)
        atom = f.arg if neg else f
        who = atom.args[0].name
        word = atom.name.lower()
        obj = _a(word) if atom.name in nouns else word
        return f"{who} is {'not ' if neg else ''}{obj}."
    if isinstance(f, Compare) and isinstance(f.lhs, Atom) and f.lhs.name == POS:
        a = _oname(f.lhs.args[0].name)
        if isinstance(f.rhs, IntConst) and f.op == "=":
            k = f.rhs.value
            if k == 1:
                return f"The {a} is the leftmost."
            if k == n_objects:
                return f"The {a} is the rightmost."
            if k > (n_objects + 1) // 2:
                return f"The {a} is the {ORDINALS[n_objects - k]} from the right."
            return f"The {a} is the {ORDINALS[k - 1]} from the left."
        if isinstance(f.rhs, Atom):
            b = _oname(f.rhs.args[0].name)
            side = {"<": "left", ">": "right"}[f.op]
            return f"The {a} is to the {side} of the {b}."
    raise ValueError(f"no sentence template for {form!r}")


def _verify(envelope: dict) -> Optional[str]:
    """Gold label computed by the exact solver, or None if not unique."""
    from ..sanitizer import Proceed, sanitize
    from ..soft import BooleanVerdict, OptionVerdict, hard_solve

    problem = parse_problem(envelope)
    decision = sanitize(problem)
    if not isinstance(decision, Proceed):
        return None
    verdict = hard_solve(problem, decision.facts)
    if isinstance(verdict, BooleanVerdict):
        return {"True": "A", "False": "B", "Unknown": "C"}[verdict.value.value]
    if isinstance(verdict, OptionVerdict):
        return verdict.label
    return None


def gold_label(envelope: dict) -> Optional[str]:
    return _verify(envelope)


def ontology(rng: random.Random, index: int, hops: int = 5) -> BenchProblem:
    classes = rng.sample(CLASSES, hops + 2)
    chain, other = classes[: hops + 1], classes[hops + 1]
    adjs = rng.sample(ADJECTIVES, 4)
    target, decor = adjs[0], adjs[1:]
    who = rng.choice(NAMES)
    polarity = rng.random() < 0.5
    nouns = {_pred(c) for c in classes}

    forms = [f"forall x. {_pred(chain[i])}(x) -> {_pred(chain[i + 1])}(x)" for i in range(hops)]
    forms.append(f"forall x. {_pred(chain[-1])}(x) -> {'' if polarity else 'not '}{_pred(target)}(x)")
    forms.append(f"forall x. {_pred(other)}(x) -> {'not ' if polarity else ''}{_pred(target)}(x)")
    for adj in decor:
        c = rng.choice(chain[:-1])
        forms.append(f"forall x. {_pred(c)}(x) -> {'not ' if rng.random() < 0.3 else ''}{_pred(adj)}(x)")
    rng.shuffle(forms)
    forms.append(f"{_pred(chain[0])}({who})")

    asks_positive = rng.random() < 0.5
    query = f"{'' if asks_positive else 'not '}{_pred(target)}({who})"
    statement = f"{who} is {'' if asks_positive else 'not '}{target}."
    facts = [[sentence_for(f, nouns), f] for f in forms]
    envelope = {"objects": [who], "facts": facts, "query": query}
    gold = "A" if polarity == asks_positive else "B"
    checked = _verify(envelope)
    if checked != gold:
        raise AssertionError(f"generated ontology problem disagrees with the solver ({checked} vs {gold})")
    return BenchProblem(
        id=f"synthetic-ontology-{index}",
        context=" ".join(s for s, _ in facts),
        question=f"Is the following statement true or false? {statement}",
        options=BOOLEAN_OPTIONS,
        gold_label=gold,
        dataset="synthetic",
        envelope=envelope,
        meta={"kind": "ontology", "nouns": sorted(nouns), "hops": hops},
    )


def _count_solutions(objs, clues) -> int:
    n = len(objs)
    count = 0
    for perm in itertools.permutations(range(1, n + 1)):
        pos = dict(zip(objs, perm))
        if all(c(pos) for c in clues):
            count += 1
    return count


def _clue(rng: random.Random, objs, pos) -> tuple[str, object]:
    if rng.random() < 0.3:
        a = rng.choice(objs)
        k = pos[a]
        return f"Pos({a}) = {k}", (lambda p, a=a, k=k: p[a] == k)
    a, b = rng.sample(objs, 2)
    if pos[a] < pos[b]:
        return f"Pos({a}) < Pos({b})", (lambda p, a=a, b=b: p[a] < p[b])
    return f"Pos({a}) > Pos({b})", (lambda p, a=a, b=b: p[a] > p[b])


def ordering(rng: random.Random, index: int, n: int = 5) -> BenchProblem:
    scene, pool = rng.choice(SCENES)
    names = rng.sample(pool, n)
    objs = [_oid(x) for x in names]
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    pos = dict(zip(objs, perm))
    forms: list[str] = []
    checks = []
    left = _count_solutions(objs, checks)
    while left != 1:
        form, check = _clue(rng, objs, pos)
        now = _count_solutions(objs, checks + [check])
        if now == left:
            continue  # redundant clue
        forms.append(form)
        checks.append(check)
        left = now
    k = rng.randint(1, n)
    from_right = rng.random() < 0.5
    where = f"the {ORDINALS[n - k]} from the right" if from_right else f"the {ORDINALS[k - 1]} from the left"
    labels = "ABCDEFG"[:n]
    option_text = [(labels[i], f"The {names[i]} is {where}.") for i in range(n)]
    query = {labels[i]: f"Pos({objs[i]}) = {k}" for i in range(n)}
    gold = next(labels[i] for i in range(n) if pos[objs[i]] == k)
    facts = [[sentence_for(f, set(), n), f] for f in forms]
    envelope = {"objects": objs, "larger_direction": "right", "facts": facts, "query": query}
    checked = _verify(envelope)
    if checked != gold:
        raise AssertionError(f"generated ordering problem disagrees with the solver ({checked} vs {gold})")
    listing = ", ".join(_a(x) for x in names[:-1]) + f", and {_a(names[-1])}"
    preamble = f"{scene}: {listing}."
    return BenchProblem(
        id=f"synthetic-ordering-{index}",
        context=" ".join([preamble] + [s for s, _ in facts]),
        question=" ".join(f"{lab}) {text}" for lab, text in option_text),
        options=tuple(option_text),
        gold_label=gold,
        dataset="synthetic",
        envelope=envelope,
        meta={"kind": "ordering", "schema": "ordering", "n": n, "solution": {o: pos[o] for o in objs}},
    )


def generate_synthetic(kind: str, count: int, seed: int) -> list[BenchProblem]:
    if count < 1:
        raise ValueError("count must be at least 1")
    make = {"ontology": ontology, "ordering": ordering}.get(kind)
    if make is None:
        raise ValueError(f"unknown synthetic kind {kind!r}")
    return [make(random.Random(f"{kind}:{seed}:{i}"), i) for i in range(count)]


_IDENT = re.compile(r"[^A-Za-z0-9]+")


def nullary_form(sentence: str) -> str:
    """Logical form a translator gives a context-free sentence: a bare proposition."""
    name = _IDENT.sub("_", sentence).strip("_")
    if name[:1].isdigit():
        name = "S_" + name
    return f"{name}()"
