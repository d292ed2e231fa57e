"""Concrete syntax for formulas.

Grammar sketch::

    formula  := ('exists' | 'forall') VAR ('in' 'E')? '.' formula | or
    or       := and ('or' and)*
    and      := neg ('and' neg)*
    neg      := 'not' neg | primary
    primary  := '(' formula ')' | 'E' '(' term ')' | term REL term
    term     := ['-'] factor (('+' | '-') factor)*
    factor   := RATIONAL ['*' VAR] | VAR
    REL      := '=' | '<' | '<=' | '>' | '>=' | '!='

Rationals are `p/q` or `p`; `#` starts a comment.  <=, >=, >, != are sugar
expanded into {=, <} combinations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from .logic import (
    And,
    Atom,
    EAtom,
    Formula,
    LinearForm,
    Not,
    Or,
    Quant,
    canonical_atom,
    disj,
)
from .numeric import format_rational

_KEYWORDS = {"and", "or", "not", "exists", "forall", "in", "E"}
_SYMBOLS = ("<=", ">=", "!=", "(", ")", ".", "+", "-", "*", "/", "=", "<", ">")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass
class _Token:
    kind: str  # "ident" | "int" | "sym" | "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str) -> List[_Token]:
    tokens: List[_Token] = []
    for lineno, raw in enumerate(text.splitlines() or [""], start=1):
        line = raw.split("#", 1)[0]
        i = 0
        while i < len(line):
            ch = line[i]
            if ch.isspace():
                i += 1
                continue
            col = i + 1
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(line) and (line[j].isalnum() or line[j] == "_"):
                    j += 1
                tokens.append(_Token("ident", line[i:j], lineno, col))
                i = j
                continue
            if ch.isdigit():
                j = i
                while j < len(line) and line[j].isdigit():
                    j += 1
                tokens.append(_Token("int", line[i:j], lineno, col))
                i = j
                continue
            for sym in _SYMBOLS:
                if line.startswith(sym, i):
                    tokens.append(_Token("sym", sym, lineno, col))
                    i += len(sym)
                    break
            else:
                raise ParseError(f"unexpected character {ch!r}", lineno, col)
    last = tokens[-1] if tokens else None
    tokens.append(
        _Token("eof", "", last.line if last else 1, last.column + 1 if last else 1)
    )
    return tokens


class _Parser:
    def __init__(self, tokens: List[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(message, tok.line, tok.column)

    def expect_sym(self, text: str) -> None:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == text:
            self.next()
            return
        raise self.error(f"expected {text!r}")

    def at_keyword(self, word: str) -> bool:
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    # formula levels -------------------------------------------------------

    def formula(self) -> Formula:
        if self.at_keyword("exists") or self.at_keyword("forall"):
            kind = self.next().text
            tok = self.peek()
            if tok.kind != "ident" or tok.text in _KEYWORDS:
                raise self.error("expected a variable name")
            var = self.next().text
            in_e = False
            if self.at_keyword("in"):
                self.next()
                if not self.at_keyword("E"):
                    raise self.error("expected 'E' after 'in'")
                self.next()
                in_e = True
            self.expect_sym(".")
            return Quant(kind, var, in_e, self.formula())
        return self.or_level()

    def or_level(self) -> Formula:
        parts = [self.and_level()]
        while self.at_keyword("or"):
            self.next()
            parts.append(self.and_level())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def and_level(self) -> Formula:
        parts = [self.neg_level()]
        while self.at_keyword("and"):
            self.next()
            parts.append(self.neg_level())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def neg_level(self) -> Formula:
        if self.at_keyword("not"):
            self.next()
            return Not(self.neg_level())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "(":
            self.next()
            inner = self.formula()
            self.expect_sym(")")
            return inner
        if self.at_keyword("E"):
            self.next()
            self.expect_sym("(")
            term = self.term()
            self.expect_sym(")")
            return EAtom(term)
        return self.comparison()

    def comparison(self) -> Formula:
        left = self.term()
        tok = self.peek()
        if tok.kind != "sym" or tok.text not in ("=", "<", "<=", ">", ">=", "!="):
            raise self.error("expected a relation")
        rel = self.next().text
        right = self.term()
        form = left - right
        if rel == "=":
            return canonical_atom(Atom(form, "="))
        if rel == "<":
            return canonical_atom(Atom(form, "<"))
        if rel == ">":
            return canonical_atom(Atom(-form, "<"))
        if rel == "<=":
            return disj([canonical_atom(Atom(form, "<")), canonical_atom(Atom(form, "="))])
        if rel == ">=":
            return disj([canonical_atom(Atom(-form, "<")), canonical_atom(Atom(form, "="))])
        return disj([canonical_atom(Atom(form, "<")), canonical_atom(Atom(-form, "<"))])

    # terms ------------------------------------------------------------------

    def term(self) -> LinearForm:
        sign = 1
        tok = self.peek()
        if tok.kind == "sym" and tok.text == "-":
            self.next()
            sign = -1
        form = self.factor().scale(sign)
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text in ("+", "-"):
                self.next()
                nxt = self.factor()
                form = form + nxt if tok.text == "+" else form - nxt
            else:
                return form

    def factor(self) -> LinearForm:
        tok = self.peek()
        if tok.kind == "int":
            value = Fraction(int(self.next().text))
            nxt = self.peek()
            if nxt.kind == "sym" and nxt.text == "/":
                self.next()
                den = self.peek()
                if den.kind != "int":
                    raise self.error("expected a denominator")
                value /= int(self.next().text)
                nxt = self.peek()
            if nxt.kind == "sym" and nxt.text == "*":
                self.next()
                var = self.peek()
                if var.kind != "ident" or var.text in _KEYWORDS:
                    raise self.error("expected a variable after '*'")
                return LinearForm.variable(self.next().text).scale(value)
            return LinearForm.constant(value)
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            return LinearForm.variable(self.next().text)
        raise self.error("expected a term")


def parse_formula(text: str) -> Formula:
    parser = _Parser(_tokenize(text))
    formula = parser.formula()
    tok = parser.peek()
    if tok.kind != "eof":
        raise parser.error(f"unexpected trailing input {tok.text!r}")
    return formula


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_QUANT = 0
_PREC_OR = 1
_PREC_AND = 2
_PREC_NOT = 3
_PREC_ATOM = 4


def format_formula(f: Formula) -> str:
    return _fmt(f, _PREC_QUANT)


def _fmt(f: Formula, parent: int) -> str:
    if isinstance(f, Atom):
        return f"{f.form} {f.rel} 0"
    if isinstance(f, EAtom):
        return f"E({f.term})"
    if isinstance(f, Not):
        text = f"not {_fmt(f.body, _PREC_NOT)}"
        return text if parent <= _PREC_NOT else f"({text})"
    if isinstance(f, And):
        text = " and ".join(_fmt(a, _PREC_AND) for a in f.args)
        return text if parent <= _PREC_AND else f"({text})"
    if isinstance(f, Or):
        text = " or ".join(_fmt(a, _PREC_OR) for a in f.args)
        return text if parent <= _PREC_OR else f"({text})"
    if isinstance(f, Quant):
        scope = f" in E" if f.in_e else ""
        text = f"{f.kind} {f.var}{scope}. {_fmt(f.body, _PREC_QUANT)}"
        return text if parent <= _PREC_QUANT else f"({text})"
    raise TypeError(f"not a formula: {f!r}")
