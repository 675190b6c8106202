"""Normalised benchmark records.

One JSON object per line::

    {"id": "...", "context": "...", "question": "...",
     "options": {"A": "True", "B": "False"}, "answer": "B",
     "dataset": "prontoqa", "envelope": {...}}

``envelope`` is optional (synthetic problems carry their gold translation).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Optional

from ..errors import SchemaError
from ..lang.problem import Schema

DATASETS = ("prontoqa", "proofwriter", "folio", "logicaldeduction", "synthetic")
SAMPLE = 200


@dataclass(frozen=True)
class BenchProblem:
    id: str
    context: str
    question: str
    options: tuple[tuple[str, str], ...]
    gold_label: str
    dataset: str
    envelope: Optional[dict] = field(default=None, compare=False)
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.gold_label not in self.labels:
            raise ValueError(f"gold label {self.gold_label!r} is not an option of {self.id}")

    @property
    def labels(self) -> list[str]:
        return [k for k, _ in self.options]

    @property
    def option_map(self) -> dict[str, str]:
        return dict(self.options)

    @property
    def schema(self) -> Schema:
        if self.dataset == "logicaldeduction" or self.meta.get("schema") == Schema.ORDERING.value:
            return Schema.ORDERING
        return Schema.DEDUCTION

    def with_text(self, context: str, **changes) -> "BenchProblem":
        return replace(self, context=context, **changes)

    def to_json(self) -> dict:
        doc: dict[str, Any] = {
            "id": self.id,
            "dataset": self.dataset,
            "context": self.context,
            "question": self.question,
            "options": dict(self.options),
            "answer": self.gold_label,
        }
        if self.envelope is not None:
            doc["envelope"] = self.envelope
        if self.meta:
            doc["meta"] = self.meta
        return doc


_REQUIRED = ("id", "context", "question", "options", "answer")


def problem_from_json(doc: Mapping, line: int = 0, tag: Optional[str] = None) -> BenchProblem:
    if not isinstance(doc, Mapping):
        raise SchemaError(line, "record is not an object")
    for key in _REQUIRED:
        if key not in doc or doc[key] in (None, ""):
            raise SchemaError(line, f"missing field {key!r}")
    options = doc["options"]
    if not isinstance(options, Mapping) or len(options) < 2:
        raise SchemaError(line, "options must map at least two labels to texts")
    if not all(isinstance(k, str) and isinstance(v, str) for k, v in options.items()):
        raise SchemaError(line, "option labels and texts must be strings")
    answer = doc["answer"]
    if answer not in options:
        raise SchemaError(line, f"answer {answer!r} is not an option label")
    dataset = tag or doc.get("dataset") or "synthetic"
    if dataset not in DATASETS:
        raise SchemaError(line, f"unknown dataset tag {dataset!r}")
    env = doc.get("envelope")
    if env is not None and not isinstance(env, Mapping):
        raise SchemaError(line, "envelope must be an object")
    return BenchProblem(
        id=str(doc["id"]),
        context=str(doc["context"]),
        question=str(doc["question"]),
        options=tuple((str(k), str(v)) for k, v in options.items()),
        gold_label=str(answer),
        dataset=dataset,
        envelope=dict(env) if env is not None else None,
        meta=dict(doc.get("meta") or {}),
    )


def read_records(lines: Iterable[str], tag: Optional[str] = None) -> list[BenchProblem]:
    out = []
    seen: set[str] = set()
    for n, text in enumerate(lines, 1):
        if not text.strip():
            continue
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(n, f"invalid JSON: {exc.msg}") from None
        p = problem_from_json(doc, n, tag)
        if p.id in seen:
            raise SchemaError(n, f"duplicate id {p.id!r}")
        seen.add(p.id)
        out.append(p)
    return out


def sample(problems: list[BenchProblem], n: Optional[int], seed: int) -> list[BenchProblem]:
    """Seeded uniform sample that keeps file order."""
    if n is None or n >= len(problems):
        return list(problems)
    picked = sorted(random.Random(seed).sample(range(len(problems)), n))
    return [problems[i] for i in picked]


def load_dataset(path: str | Path, tag: Optional[str] = None, *, sample_size: Optional[int] = SAMPLE, seed: int = 0) -> list[BenchProblem]:
    with open(path, encoding="utf-8") as fh:
        problems = read_records(fh, tag)
    return sample(problems, sample_size, seed)


def write_records(problems: Iterable[BenchProblem], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in problems:
            fh.write(json.dumps(p.to_json(), ensure_ascii=False) + "\n")
