"""Recursive-descent parser for the surface syntax.

Binding strength, loosest first::

    forall/exists  <->  ->  or  and  not  (atom | comparison)
    comparison:  sum relop sum
    sum: + -   term: * / //   power: ** (right assoc)   unary minus

``->`` and ``<->`` associate to the right; ``and``/``or`` chains become one
n-ary node.  A quantifier extends as far right as possible.  Error
positions are 1-based columns; end of input is ``len(text) + 1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError
from .ast import (
    And,
    Arith,
    Atom,
    BoolVal,
    Compare,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    IntConst,
    Not,
    NumExpr,
    Obj,
    Or,
    Var,
)

KEYWORDS = {
    "not": "NOT",
    "and": "AND",
    "or": "OR",
    "forall": "FORALL",
    "exists": "EXISTS",
    "exist": "EXISTS",
    "boolval": "BOOLVAL",
}

# longest first so that "<->" wins over "<=" and "<"
_SYMBOLS = [
    ("<->", "IFF"),
    ("->", "IMP"),
    ("**", "POW"),
    ("//", "FDIV"),
    ("&&", "AND"),
    ("||", "OR"),
    ("<=", "REL"),
    (">=", "REL"),
    ("!=", "REL"),
    ("==", "REL"),
    ("<", "REL"),
    (">", "REL"),
    ("=", "REL"),
    ("!", "NOT"),
    ("&", "AND"),
    ("|", "OR"),
    ("*", "MUL"),
    ("/", "DIV"),
    ("+", "ADD"),
    ("-", "SUB"),
    ("(", "LP"),
    (")", "RP"),
    (",", "COMMA"),
    (".", "DOT"),
]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"[0-9]+")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            kind = KEYWORDS.get(word.lower(), "IDENT")
            tokens.append(Token(kind, word, i + 1))
            i = m.end()
            continue
        m = _INT.match(text, i)
        if m:
            if m.end() < n and (text[m.end()].isalpha() or text[m.end()] == "_"):
                raise ParseError(i + 1, "identifier cannot start with a digit", text)
            tokens.append(Token("INT", m.group(), i + 1))
            i = m.end()
            continue
        for sym, kind in _SYMBOLS:
            if text.startswith(sym, i):
                if kind == "REL":
                    sym_norm = {"==": "=", }.get(sym, sym)
                    tokens.append(Token(kind, sym_norm, i + 1))
                else:
                    tokens.append(Token(kind, sym, i + 1))
                i += len(sym)
                break
        else:
            raise ParseError(i + 1, f"unexpected character {ch!r}", text)
    tokens.append(Token("EOF", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.toks = tokenize(text)
        self.pos = 0
        self.bound: list[str] = []

    # -- token helpers -------------------------------------------------
    @property
    def cur(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        tok = self.toks[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        if self.cur.kind != kind:
            self.fail(f"expected {what}")
        return self.advance()

    def fail(self, reason: str, tok: Token | None = None):
        tok = tok or self.cur
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise ParseError(tok.col, f"{reason}, found {found}", self.text)

    # -- formulas --------------------------------------------------------
    def formula(self) -> Formula:
        if self.cur.kind in ("FORALL", "EXISTS"):
            return self.quantified()
        return self.iff()

    def quantified(self) -> Formula:
        tok = self.advance()
        var_tok = self.cur
        if var_tok.kind != "IDENT":
            self.fail("expected a variable after quantifier")
        self.advance()
        if var_tok.text in self.bound:
            self.fail(f"variable {var_tok.text!r} already bound", var_tok)
        self.expect("DOT", "'.' after quantified variable")
        if self.cur.kind == "EOF":
            self.fail("dangling quantifier")
        self.bound.append(var_tok.text)
        try:
            body = self.formula()
        finally:
            self.bound.pop()
        cls = ForAll if tok.kind == "FORALL" else Exists
        return cls(var_tok.text, body)

    def iff(self) -> Formula:
        lhs = self.implication()
        if self.cur.kind == "IFF":
            self.advance()
            rhs = self.formula() if self.cur.kind in ("FORALL", "EXISTS") else self.iff()
            return Iff(lhs, rhs)
        return lhs

    def implication(self) -> Formula:
        lhs = self.disjunction()
        if self.cur.kind == "IMP":
            self.advance()
            rhs = self.formula() if self.cur.kind in ("FORALL", "EXISTS") else self.implication()
            return Implies(lhs, rhs)
        return lhs

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.cur.kind == "OR":
            self.advance()
            parts.append(self.conjunction())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.cur.kind == "AND":
            self.advance()
            parts.append(self.unary())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def unary(self) -> Formula:
        kind = self.cur.kind
        if kind == "NOT":
            self.advance()
            return Not(self.unary())
        if kind in ("FORALL", "EXISTS"):
            return self.quantified()
        return self.primary()

    def primary(self) -> Formula:
        tok = self.cur
        if tok.kind == "BOOLVAL":
            self.advance()
            self.expect("LP", "'(' after BoolVal")
            val = self.cur
            if val.kind != "IDENT" or val.text.lower() not in ("true", "false"):
                self.fail("expected True or False")
            self.advance()
            self.expect("RP", "')'")
            return BoolVal(val.text.lower() == "true")
        if tok.kind == "LP":
            saved = self.pos
            try:
                self.advance()
                inner = self.formula()
                self.expect("RP", "')'")
            except ParseError as err:
                # maybe a parenthesised arithmetic operand, e.g. (Pos(a) + 1) > 2
                self.pos = saved
                try:
                    return self.comparison()
                except ParseError:
                    raise err from None
            if self.cur.kind in ("REL", "ADD", "SUB", "MUL", "DIV", "FDIV", "POW"):
                self.pos = saved
                return self.comparison()
            return inner
        if tok.kind in ("IDENT", "INT", "SUB"):
            saved = self.pos
            lhs = self.sum()
            if self.cur.kind == "REL":
                self.pos = saved
                return self.comparison()
            if isinstance(lhs, Atom):
                return lhs
            self.fail("expected a relational operator")
        self.fail("expected a formula")

    # -- numeric expressions ---------------------------------------------
    def comparison(self) -> Compare:
        lhs = self.sum()
        if self.cur.kind != "REL":
            self.fail("expected a relational operator")
        op = self.advance().text
        rhs = self.sum()
        if self.cur.kind == "REL":
            self.fail("comparisons cannot be chained")
        return Compare(op, lhs, rhs)

    def sum(self) -> NumExpr:
        node = self.term()
        while self.cur.kind in ("ADD", "SUB"):
            op = self.advance().text
            node = Arith(op, node, self.term())
        return node

    def term(self) -> NumExpr:
        node = self.power()
        while self.cur.kind in ("MUL", "DIV", "FDIV"):
            op_tok = self.advance()
            rhs = self.power()
            if op_tok.kind in ("DIV", "FDIV") and isinstance(rhs, IntConst) and rhs.value == 0:
                raise ParseError(op_tok.col, "division by constant zero", self.text)
            node = Arith(op_tok.text, node, rhs)
        return node

    def power(self) -> NumExpr:
        base = self.unary_num()
        if self.cur.kind == "POW":
            self.advance()
            return Arith("**", base, self.power())
        return base

    def unary_num(self) -> NumExpr:
        tok = self.cur
        if tok.kind == "SUB":
            self.advance()
            if self.cur.kind == "INT":
                return IntConst(-int(self.advance().text))
            return Arith("*", IntConst(-1), self.unary_num())
        if tok.kind == "INT":
            self.advance()
            return IntConst(int(tok.text))
        if tok.kind == "IDENT":
            return self.atom()
        if tok.kind == "LP":
            self.advance()
            inner = self.sum()
            self.expect("RP", "')'")
            return inner
        self.fail("expected a number or predicate")

    def atom(self) -> Atom:
        name = self.advance()
        if self.cur.kind != "LP":
            self.fail(f"expected '(' after predicate {name.text!r}")
        self.advance()
        args: list = []
        if self.cur.kind != "RP":
            while True:
                arg = self.cur
                if arg.kind != "IDENT":
                    self.fail("expected an object or variable")
                self.advance()
                args.append(Var(arg.text) if arg.text in self.bound else Obj(arg.text))
                if self.cur.kind == "COMMA":
                    self.advance()
                    continue
                break
        self.expect("RP", "')'")
        return Atom(name.text, tuple(args))


def parse_formula(text: str) -> Formula:
    """Parse one logical form.  Raises :class:`ParseError`."""
    if not isinstance(text, str):
        raise ParseError(0, "logical form must be a string")
    parser = _Parser(text)
    if parser.cur.kind == "EOF":
        parser.fail("empty formula")
    node = parser.formula()
    if parser.cur.kind != "EOF":
        parser.fail("unexpected trailing input")
    return node


def parse_numexpr(text: str) -> NumExpr:
    parser = _Parser(text)
    node = parser.sum()
    if parser.cur.kind != "EOF":
        parser.fail("unexpected trailing input")
    return node
