"""Run a problem set and persist the results.

``records.jsonl`` and ``summary.json`` carry no timings, so identical inputs
give identical bytes.  Wall-clock numbers go to ``timings.json``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

from .datasets import BenchProblem
from .perturb import PerturbSpec, perturb
from .pipeline import EvalRecord, PipelineConfig, run_pipeline
from .stats import format_summary, summarize

RECORDS = "records.jsonl"
SUMMARY = "summary.json"
TIMINGS = "timings.json"


def evaluate(
    problems: Sequence[BenchProblem],
    gateway=None,
    config: Optional[PipelineConfig] = None,
    *,
    perturbation: Optional[PerturbSpec] = None,
    workers: int = 1,
) -> list[EvalRecord]:
    """Records in input order whatever the pool width."""

    def one(p: BenchProblem) -> EvalRecord:
        if perturbation is not None:
            p = perturb(p, perturbation)
        return run_pipeline(p, gateway, config)

    if workers <= 1:
        return [one(p) for p in problems]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, problems))


def _dump(doc) -> str:
    return json.dumps(doc, sort_keys=True, ensure_ascii=False)


def write_results(records: Sequence[EvalRecord], out_dir: str | Path) -> dict:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / RECORDS, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(_dump(r.to_json()) + "\n")
    summary = summarize(records)
    (out / SUMMARY).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    timings = {
        "total": sum(r.timings.get("total", 0.0) for r in records),
        "per_problem": {r.id: r.timings for r in records},
    }
    (out / TIMINGS).write_text(json.dumps(timings, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return summary


def read_records(path: str | Path) -> list[EvalRecord]:
    p = Path(path)
    if p.is_dir():
        p = p / RECORDS
    with open(p, encoding="utf-8") as fh:
        return [EvalRecord.from_json(json.loads(line)) for line in fh if line.strip()]


def report(path: str | Path) -> str:
    p = Path(path)
    records = read_records(p)
    timings = None
    side = (p if p.is_dir() else p.parent) / TIMINGS
    if side.exists():
        timings = {"total": json.loads(side.read_text(encoding="utf-8"))["total"]}
    return format_summary(summarize(records, timings))
