"""Restricted first-order language: AST, parser, printer, envelopes."""

from .ast import (
    And,
    Arith,
    Atom,
    BoolVal,
    Compare,
    Exists,
    FALSE,
    ForAll,
    Formula,
    Iff,
    Implies,
    IntConst,
    Not,
    NumExpr,
    Obj,
    Or,
    TRUE,
    Var,
    atoms_of,
    conj,
    disj,
)
from .parser import parse_formula, parse_numexpr, tokenize
from .printer import atom_text, to_text, to_text_full
from .problem import (
    POS,
    BooleanQuery,
    CandidateMap,
    Fact,
    Fold,
    FreeNumeric,
    Malformed,
    MalformedQuery,
    Problem,
    Schema,
    Sort,
    canonicalize,
    canonicalize_atom,
    check_sorts,
    infer_sorts,
    parse_problem,
    query_formulas,
)
