#!/usr/bin/env python3
"""Convert public benchmark dumps to the normalized line-delimited schema.

Each output line is one JSON object::

    {"id": ..., "dataset": ..., "context": ..., "question": ...,
     "options": {"A": "True", "B": "False"}, "answer": "A"}

Two input layouts are understood:

* the processed JSON array used by several symbolic-reasoning repos, where
  every record has ``id``, ``context``, ``question``, ``options`` (a list like
  ``["A) True", "B) False"]``) and ``answer`` (a label);
* raw FOLIO jsonl (``premises``, ``conclusion``, ``label``).

Usage::

    python3 scripts/convert_dataset.py prontoqa dev.json -o prontoqa.jsonl
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path

_OPTION = re.compile(r"^\s*\(?([A-Z])\)?[).:]?\s*(.*)$")
_FOLIO_LABELS = {"True": "A", "False": "B", "Uncertain": "C", "Unknown": "C"}
_TRUTH_OPTIONS = {"A": "True", "B": "False", "C": "Unknown"}


def split_options(items) -> dict[str, str]:
    if isinstance(items, dict):
        return {str(k): str(v) for k, v in items.items()}
    out = {}
    for item in items:
        m = _OPTION.match(str(item))
        if not m:
            raise ValueError(f"cannot read option {item!r}")
        out[m.group(1)] = m.group(2).strip()
    return out


def _answer(raw, options: dict[str, str]) -> str:
    raw = str(raw).strip()
    if raw in options:
        return raw
    m = _OPTION.match(raw)
    if m and m.group(1) in options:
        return m.group(1)
    for label, text in options.items():
        if text.lower() == raw.lower():
            return label
    raise ValueError(f"answer {raw!r} is not among the options")


def from_processed(doc: dict, dataset: str) -> dict:
    options = split_options(doc["options"])
    return {
        "id": str(doc["id"]),
        "dataset": dataset,
        "context": " ".join(str(doc["context"]).split()),
        "question": str(doc["question"]).strip(),
        "options": options,
        "answer": _answer(doc["answer"], options),
    }


def from_folio(doc: dict, n: int) -> dict:
    premises = doc["premises"]
    if isinstance(premises, list):
        premises = " ".join(premises)
    return {
        "id": str(doc.get("example_id", doc.get("id", f"folio-{n}"))),
        "dataset": "folio",
        "context": " ".join(premises.split()),
        "question": "Based on the above information, is the following statement true, false, or uncertain? "
        + doc["conclusion"].strip(),
        "options": dict(_TRUTH_OPTIONS),
        "answer": _FOLIO_LABELS[str(doc["label"])],
    }


def read_source(path: Path) -> list[dict]:
    text = path.read_text(encoding="utf-8").strip()
    if text.startswith("["):
        return json.loads(text)
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def convert(dataset: str, records: list[dict]) -> list[dict]:
    out = []
    for n, doc in enumerate(records, 1):
        if "premises" in doc and "conclusion" in doc:
            out.append(from_folio(doc, n))
        else:
            out.append(from_processed(doc, dataset))
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dataset", choices=("prontoqa", "proofwriter", "folio", "logicaldeduction"))
    ap.add_argument("source", type=Path)
    ap.add_argument("-o", "--out", type=Path)
    args = ap.parse_args(argv)
    rows = convert(args.dataset, read_source(args.source))
    fh = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    finally:
        if args.out:
            fh.close()
    if args.out:
        print(f"{len(rows)} records written to {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
