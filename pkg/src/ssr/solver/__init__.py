from .api import (
    Sat,
    SatResult,
    SolverConfig,
    Truth,
    Unsat,
    assignment_formula,
    check_sat,
    dump_grounding,
    entail_boolean,
    make_engine,
    solve_numeric,
)
from .dense import DenseEngine
from .evaluate import evaluate
from .grounding import GroundAtomTable, GroundConstraint, Grounding, ground
from .search import SearchEngine

__all__ = [
    "DenseEngine",
    "GroundAtomTable",
    "GroundConstraint",
    "Grounding",
    "Sat",
    "SatResult",
    "SearchEngine",
    "SolverConfig",
    "Truth",
    "Unsat",
    "assignment_formula",
    "check_sat",
    "dump_grounding",
    "entail_boolean",
    "evaluate",
    "ground",
    "make_engine",
    "solve_numeric",
]
