#!/usr/bin/env python3
"""Author the replay pack for the eight worked case studies.

Reads ``scripts/data/worked_cases_source.json`` (problem text, options, gold
answer, the translation the model produced, its CoT reply if any, and its
answer to premise checks), drives the real pipeline through a scripted
transport in record mode, and writes

    src/ssr/data/worked_cases/cases.jsonl
    src/ssr/data/worked_cases/fixtures/<sha256>.json

Re-running is idempotent: fixture names are content hashes.
"""

from __future__ import annotations

import argparse
import json
import shutil
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from ssr.bench.datasets import BenchProblem, write_records  # noqa: E402
from ssr.bench.pipeline import run_pipeline  # noqa: E402
from ssr.gateway import FixtureStore, Gateway, GatewayConfig, RecordTransport, ScriptedTransport  # noqa: E402


def problems(source: list[dict]) -> list[BenchProblem]:
    return [
        BenchProblem(
            id=f"case-{c['name']}",
            context=c["context"],
            question=c["question"],
            options=tuple(c["options"].items()),
            gold_label=c["answer"],
            dataset=c["dataset"],
            meta={"case": c["name"]},
        )
        for c in source
    ]


def script_for(case: dict):
    def script(kind: str, messages: list):
        if kind == "translate":
            return json.dumps(case["translation"], ensure_ascii=False)
        if kind == "verify":
            return case.get("premise_check", "no")
        if kind == "cot":
            if "cot" not in case:
                raise RuntimeError(f"{case['name']}: unexpected CoT call")
            return case["cot"]
        raise RuntimeError(f"{case['name']}: unexpected {kind} call")

    return script


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--source", default=str(ROOT / "scripts" / "data" / "worked_cases_source.json"))
    ap.add_argument("--out", default=str(ROOT / "src" / "ssr" / "data" / "worked_cases"))
    args = ap.parse_args(argv)

    source = json.loads(Path(args.source).read_text(encoding="utf-8"))
    out = Path(args.out)
    fixtures = out / "fixtures"
    if fixtures.exists():
        shutil.rmtree(fixtures)
    store = FixtureStore(fixtures)
    cfg = GatewayConfig(mode="record", fixtures=str(fixtures), logprobs=False)
    probs = problems(source)
    for case, prob in zip(source, probs):
        gw = Gateway(RecordTransport(ScriptedTransport(script_for(case)), store), cfg)
        rec = run_pipeline(prob, gw)
        print(f"{case['name']:<9} {rec.branch:<11} label={rec.label} gold={rec.gold} fwd={rec.forward} bwd={rec.backward}")
    write_records(probs, out / "cases.jsonl")
    print(f"{len(store)} fixtures in {fixtures}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
