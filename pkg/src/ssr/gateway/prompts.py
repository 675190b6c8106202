"""Prompt text for every gateway call.

The translator, CoT and direct-answer prompts live in ``templates/`` and are
used byte-for-byte.  The premise-check and rendering prompts are our own.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from typing import Mapping, Sequence

from ..lang.problem import Schema

_FILES = {
    "direct": "direct.txt",
    "cot": "cot.txt",
    Schema.DEDUCTION: "translate_deduction.txt",
    Schema.ORDERING: "translate_ordering.txt",
}


@lru_cache(maxsize=None)
def template(name) -> str:
    return resources.files(__package__).joinpath("templates", _FILES[name]).read_text(encoding="utf-8")


def translation_prompt(context: str, question: str, schema: Schema | str) -> str:
    return template(Schema(schema)).format(context=context, question=question)


def _options_block(options: Mapping[str, str] | Sequence[tuple[str, str]] | None) -> str:
    if not options:
        return ""
    items = options.items() if isinstance(options, Mapping) else options
    return "\n".join(f"{label}) {text}" for label, text in items)


def problem_message(context: str, question: str, options=None) -> str:
    parts = [f"Context:\n{context}", f"Question:\n{question}"]
    block = _options_block(options)
    if block and block not in question:
        parts.append(f"Options:\n{block}")
    return "\n".join(parts)


def cot_messages(context: str, question: str, options=None) -> list[dict]:
    return [
        {"role": "system", "content": template("cot")},
        {"role": "user", "content": problem_message(context, question, options)},
    ]


def direct_messages(context: str, question: str, options=None) -> list[dict]:
    return [
        {"role": "system", "content": template("direct")},
        {"role": "user", "content": problem_message(context, question, options)},
    ]


VERIFY_SYSTEM = (
    "You check whether a single statement follows from a problem description "
    "or from commonsense knowledge. Reply with exactly one word: yes or no."
)


def verify_messages(assignment: str, context: str, question: str) -> list[dict]:
    user = (
        f"Context:\n{context}\nQuestion:\n{question}\n"
        f"Statement:\n{assignment}\n"
        "Can the statement be inferred from the context or from commonsense knowledge? Answer yes or no."
    )
    return [{"role": "system", "content": VERIFY_SYSTEM}, {"role": "user", "content": user}]


RENDER_SYSTEM = (
    "Rewrite the numbered symbolic derivation as a short natural-language explanation. "
    "Keep one sentence per numbered step, keep the order, and do not add new facts."
)


def render_messages(listing: str) -> list[dict]:
    return [{"role": "system", "content": RENDER_SYSTEM}, {"role": "user", "content": listing}]


def translate_messages(context: str, question: str, schema: Schema | str) -> list[dict]:
    return [{"role": "user", "content": translation_prompt(context, question, schema)}]
