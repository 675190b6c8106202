"""One problem through the whole pipeline: translate, gate, solve, explain, score."""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from ..chains import chain_correct, forward_chain, backward_chain, prepare_theory
from ..chains.model import NoChain
from ..errors import GatewayError, SSRError
from ..lang.problem import BooleanQuery, CandidateMap, parse_problem
from ..retrieval import make_resolver
from ..sanitizer import Proceed, sanitize
from ..soft import (
    BooleanVerdict,
    FallbackVerdict,
    OptionVerdict,
    Verdict,
    apply_weights,
    hard_solve,
    soft_solve,
    verdict_text,
)
from ..solver import SolverConfig, Truth
from .datasets import BenchProblem
from .stats import FALLBACK, SYMBOLIC

log = logging.getLogger(__name__)

_TRUTH_WORDS = {
    "true": Truth.TRUE,
    "yes": Truth.TRUE,
    "false": Truth.FALSE,
    "no": Truth.FALSE,
    "unknown": Truth.UNKNOWN,
    "uncertain": Truth.UNKNOWN,
}


def _truth_of(text: str) -> Optional[Truth]:
    return _TRUTH_WORDS.get(text.strip().strip(".()").strip().lower())


@dataclass
class PipelineConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    chains: bool = True
    direction: str = "both"
    uniform_weights: bool = False
    use_gold_envelope: bool = True
    hard: bool = False  # plain entailment, no relaxation (for comparisons)
    # dataset tag -> {"True": label, "False": label, "Unknown": label}
    label_maps: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "PipelineConfig":
        solver = dict(doc.get("solver", {}))
        if "domains" in solver:
            solver["domains"] = {k: tuple(v) for k, v in solver["domains"].items()}
        return cls(
            solver=SolverConfig(**solver),
            chains=bool(doc.get("chains", True)),
            direction=doc.get("direction", "both"),
            uniform_weights=bool(doc.get("uniform_weights", False)),
            use_gold_envelope=bool(doc.get("use_gold_envelope", True)),
            hard=bool(doc.get("hard", False)),
            label_maps=dict(doc.get("label_maps", {})),
        )


def load_config(path: str | Path | None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    return PipelineConfig.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


@dataclass
class EvalRecord:
    id: str
    dataset: str
    branch: str
    verdict: Optional[str]
    label: Optional[str]
    gold: str
    correct: bool
    forward: Optional[bool] = None
    backward: Optional[bool] = None
    reason: Optional[str] = None
    case: Optional[str] = None
    sat_flags: Optional[list] = None
    chain_stops: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        """Timing-free form, so two runs give identical bytes."""
        doc = {
            "id": self.id,
            "dataset": self.dataset,
            "branch": self.branch,
            "verdict": self.verdict,
            "label": self.label,
            "gold": self.gold,
            "correct": self.correct,
            "forward": self.forward,
            "backward": self.backward,
        }
        for key in ("reason", "case", "sat_flags"):
            if getattr(self, key) is not None:
                doc[key] = getattr(self, key)
        if self.chain_stops:
            doc["chain_stops"] = self.chain_stops
        return doc

    @classmethod
    def from_json(cls, doc: Mapping) -> "EvalRecord":
        keys = cls.__dataclass_fields__
        return cls(**{k: v for k, v in doc.items() if k in keys})


def map_label(verdict: Verdict, problem: BenchProblem, config: Optional[PipelineConfig] = None) -> Optional[str]:
    """Option label for a verdict; Unknown goes to the unknown option if there is one."""
    if isinstance(verdict, OptionVerdict):
        return verdict.label if verdict.label in problem.labels else None
    if not isinstance(verdict, BooleanVerdict):
        return None
    table = (config.label_maps.get(problem.dataset) if config else None) or {}
    if verdict.value.value in table:
        return table[verdict.value.value]
    for label, text in problem.options:
        if _truth_of(text) == verdict.value:
            return label
    return None


def gold_verdict(problem: BenchProblem, parsed=None) -> Optional[Verdict]:
    if parsed is not None and isinstance(parsed.query, CandidateMap):
        return OptionVerdict(problem.gold_label)
    truth = _truth_of(problem.option_map[problem.gold_label])
    if truth is not None and (parsed is None or isinstance(parsed.query, BooleanQuery)):
        return BooleanVerdict(truth)
    return OptionVerdict(problem.gold_label)


class _Fallback(Exception):
    def __init__(self, reason: str) -> None:
        self.reason = reason
        super().__init__(reason)


def _weighted(facts, envelope, traces, config: PipelineConfig):
    weights = envelope.get("weights") if isinstance(envelope, Mapping) else None
    if weights is not None and not config.uniform_weights:
        return [f if f.is_placeholder else f.with_weight(float(weights[f.index])) for f in facts]
    return apply_weights(facts, traces, uniform=config.uniform_weights)


def _chains(record: EvalRecord, parsed, report, gold, config: PipelineConfig) -> None:
    theory, targets = prepare_theory(parsed, report.grounding, report.kept)
    runs = {"forward": forward_chain, "backward": backward_chain}
    wanted = ("forward", "backward") if config.direction == "both" else (config.direction,)
    for name in wanted:
        result = runs[name](theory, targets)
        ok = gold is not None and chain_correct(result, theory, targets, gold)
        setattr(record, name, ok)
        record.chain_stops[name] = result.reason if isinstance(result, NoChain) else "chain"


def run_pipeline(problem: BenchProblem, gateway=None, config: Optional[PipelineConfig] = None) -> EvalRecord:
    config = config or PipelineConfig()
    clock = time.perf_counter
    t0 = clock()
    timings: dict[str, float] = {}
    record = EvalRecord(problem.id, problem.dataset, SYMBOLIC, None, None, problem.gold_label, False, timings=timings)
    try:
        traces = None
        if problem.envelope is not None and config.use_gold_envelope:
            envelope = problem.envelope
        else:
            if gateway is None:
                raise _Fallback("no gateway for translation")
            t = clock()
            try:
                result = gateway.translate(problem.context, problem.question, problem.schema)
            except GatewayError as err:
                raise _Fallback(f"translation failed: {err}") from None
            finally:
                timings["translate"] = clock() - t
            envelope, traces = result.envelope, result.traces
        t = clock()
        parsed = parse_problem(envelope)
        decision = sanitize(parsed)
        if not isinstance(decision, Proceed):
            raise _Fallback(decision.reason)
        facts = _weighted(decision.facts.facts, envelope, traces, config)
        if config.hard:
            verdict, report = hard_solve(parsed, facts, config=config.solver), None
        else:
            resolver = make_resolver(gateway, problem.context, problem.question)
            report = soft_solve(parsed, facts, config=config.solver, resolver=resolver)
            verdict = report.verdict
            record.case = report.case
            record.sat_flags = list(report.sat_flags) or None
        timings["solve"] = clock() - t
        if isinstance(verdict, FallbackVerdict):
            raise _Fallback(verdict.reason)
        record.verdict = verdict_text(verdict)
        record.label = map_label(verdict, problem, config)
        record.correct = record.label == problem.gold_label
        if config.chains and report is not None:
            t = clock()
            _chains(record, parsed, report, gold_verdict(problem, parsed), config)
            timings["chains"] = clock() - t
    except _Fallback as fb:
        _fallback(record, problem, gateway, fb.reason)
    except SSRError as err:
        log.info("%s: pipeline error %s", problem.id, err)
        _fallback(record, problem, gateway, f"{type(err).__name__}: {err}")
    timings["total"] = clock() - t0
    return record


def _fallback(record: EvalRecord, problem: BenchProblem, gateway, reason: str) -> None:
    record.branch = FALLBACK
    record.reason = reason
    record.verdict = None
    record.forward = record.backward = None
    record.chain_stops = {}
    record.label = None
    if gateway is not None:
        t = time.perf_counter()
        try:
            answer = gateway.cot_fallback(problem.context, problem.question, problem.options)
            record.label = answer.label if answer.label in problem.labels else None
        except GatewayError as err:
            record.reason = f"{reason}; CoT failed: {err}"
        record.timings["fallback"] = time.perf_counter() - t
    record.correct = record.label is not None and record.label == problem.gold_label


def with_config(config: PipelineConfig, **changes) -> PipelineConfig:
    return replace(config, **changes)
