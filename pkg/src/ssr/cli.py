"""Command-line entry point (``ssr``)."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional

from .bench.datasets import BenchProblem, load_dataset, problem_from_json, write_records
from .bench.perturb import PerturbSpec, perturb
from .bench.pipeline import PipelineConfig, load_config, run_pipeline
from .bench.results import evaluate, report, write_results
from .bench.stats import format_summary
from .bench.synth import generate_synthetic
from .errors import SSRError
from .gateway import Gateway, GatewayConfig

_DIRECTIONS = {"fwd": "forward", "bwd": "backward", "both": "both"}


def _gateway(args) -> Optional[Gateway]:
    cfg = GatewayConfig.from_env(fixtures=getattr(args, "fixtures", None), mode=getattr(args, "mode", None))
    if cfg.mode == "replay" and not cfg.fixtures:
        return None
    return Gateway.from_config(cfg)


def _read_problem(path: str) -> tuple[Optional[BenchProblem], Optional[dict]]:
    """A file holds either a bare envelope or one benchmark record."""
    text = Path(path).read_text(encoding="utf-8").strip()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = json.loads(text.splitlines()[0])  # first record of a .jsonl file
    if "query" in doc and "context" not in doc:
        return None, doc
    return problem_from_json(doc, 1), None


def _solve_envelope(envelope: dict, config: PipelineConfig) -> dict:
    from .lang.problem import parse_problem
    from .sanitizer import Proceed, sanitize
    from .soft import soft_solve

    problem = parse_problem(envelope)
    decision = sanitize(problem)
    if not isinstance(decision, Proceed):
        return {"fallback": decision.reason}
    facts = decision.facts.facts
    if isinstance(envelope.get("weights"), list):
        facts = [f.with_weight(float(envelope["weights"][f.index])) for f in facts]
    rep = soft_solve(problem, facts, config=config.solver)
    return {
        "verdict": rep.verdict.to_json(),
        "case": rep.case,
        "sat_flags": list(rep.sat_flags),
        "restored": rep.restored,
        "kept": list(rep.kept),
        "dropped": list(rep.dropped),
    }


def cmd_solve(args) -> int:
    config = load_config(args.config)
    problem, envelope = _read_problem(args.problem)
    if envelope is not None:
        out = _solve_envelope(envelope, config)
    else:
        out = run_pipeline(problem, _gateway(args), config).to_json()
    print(json.dumps(out, indent=2))
    return 0


def _load(args) -> list[BenchProblem]:
    sample = None if args.sample <= 0 else args.sample
    return load_dataset(args.dataset, args.tag, sample_size=sample, seed=args.seed)


def cmd_bench(args) -> int:
    config = load_config(args.config)
    problems = _load(args)
    spec = PerturbSpec(args.strength, args.seed) if args.strength else None
    records = evaluate(problems, _gateway(args), config, perturbation=spec, workers=args.workers)
    summary = write_results(records, args.out)
    print(format_summary(summary))
    print(f"results written to {args.out}")
    return 0


def cmd_perturb(args) -> int:
    problems = _load(args)
    spec = PerturbSpec(args.strength, args.seed)
    out = [perturb(p, spec) for p in problems]
    if args.out:
        write_records(out, args.out)
    else:
        for p in out:
            print(json.dumps(p.to_json(), ensure_ascii=False))
    return 0


def cmd_synth(args) -> int:
    problems = generate_synthetic(args.kind, args.count, args.seed)
    if args.out:
        write_records(problems, args.out)
    else:
        for p in problems:
            print(json.dumps(p.to_json(), ensure_ascii=False))
    return 0


def cmd_chains(args) -> int:
    from .chains import backward_chain, forward_chain, prepare_theory, render_chain, verdict_answer
    from .chains.model import NoChain
    from .chains.serialize import chain_to_json
    from .lang.problem import parse_problem
    from .sanitizer import Proceed, sanitize
    from .soft import soft_solve

    config = load_config(args.config)
    problem, envelope = _read_problem(args.problem)
    if envelope is None:
        if problem.envelope is not None:
            envelope = problem.envelope
        else:
            gw = _gateway(args)
            if gw is None:
                print("error: record has no envelope and no gateway is configured", file=sys.stderr)
                return 2
            envelope = gw.translate(problem.context, problem.question, problem.schema).envelope
    parsed = parse_problem(envelope)
    decision = sanitize(parsed)
    if not isinstance(decision, Proceed):
        print(f"no chains: {decision.reason}", file=sys.stderr)
        return 1
    rep = soft_solve(parsed, decision.facts, config=config.solver)
    if rep.grounding is None:
        print(f"no chains: {rep.verdict.reason}", file=sys.stderr)
        return 1
    theory, targets = prepare_theory(parsed, rep.grounding, rep.kept)
    direction = _DIRECTIONS[args.direction]
    wanted = ("forward", "backward") if direction == "both" else (direction,)
    run = {"forward": forward_chain, "backward": backward_chain}
    docs = []
    for name in wanted:
        chain = run[name](theory, targets)
        doc = chain_to_json(
            chain,
            parsed,
            kept=rep.kept,
            domains=config.solver.domains,
            bound=config.solver.bound,
            expected=verdict_answer(rep.verdict),
        )
        docs.append(doc)
        print(f"[{name}]")
        if isinstance(chain, NoChain):
            print(f"no chain ({chain.reason})")
        else:
            print(render_chain(chain, theory=theory, folds=rep.grounding.folds))
    if args.out:
        Path(args.out).write_text(json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_verify_chain(args) -> int:
    from .chains.serialize import verify_document

    doc = json.loads(Path(args.chain).read_text(encoding="utf-8"))
    docs = doc if isinstance(doc, list) else [doc]
    ok = True
    for d in docs:
        res = verify_document(d)
        print(f"{d.get('direction', '?')}: {res}")
        ok = ok and bool(res)
    return 0 if ok else 1


def cmd_report(args) -> int:
    print(report(args.results))
    return 0


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("dataset", help="line-delimited benchmark records")
    p.add_argument("--tag", help="dataset tag, overriding the records")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample", type=int, default=200, help="sample size, 0 for all")


def _gateway_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=("replay", "record", "live"))
    p.add_argument("--fixtures", help="fixture directory for replay/record")
    p.add_argument("--config", help="JSON pipeline config")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ssr", description="Soft-logic symbolic reasoning pipeline")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one envelope or benchmark record")
    p.add_argument("problem")
    _gateway_args(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a dataset through the pipeline")
    _dataset_args(p)
    _gateway_args(p)
    p.add_argument("--strength", type=int, default=0, choices=range(-2, 3))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="results")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("perturb", help="write a perturbed copy of a dataset")
    _dataset_args(p)
    p.add_argument("--strength", type=int, required=True, choices=range(-2, 3))
    p.add_argument("--out")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("chains", help="forward/backward chains for one problem")
    p.add_argument("problem")
    p.add_argument("--direction", choices=tuple(_DIRECTIONS), default="both")
    p.add_argument("--out", help="write the chain document(s) here")
    _gateway_args(p)
    p.set_defaults(func=cmd_chains)

    p = sub.add_parser("verify-chain", help="check a chain document from scratch")
    p.add_argument("chain")
    p.set_defaults(func=cmd_verify_chain)

    p = sub.add_parser("report", help="summarise a results directory or records file")
    p.add_argument("results")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("synth", help="generate synthetic problems")
    p.add_argument("--kind", choices=("ontology", "ordering"), required=True)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_synth)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (SSRError, OSError, json.JSONDecodeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
