"""Concrete syntax for sentences.

    sentence := quant* formula
    quant    := ("forall" | "exists") ident "."
    formula  := formula ("and" | "or" | "->") formula
              | "not" formula | atom | "(" formula ")"
    atom     := ident "(" termlist ")" | term "=" term
    term     := ident | rational | ident "(" termlist ")"

Quantifiers are prenex.  Precedence: "not" binds tightest, then "and",
then "or", then "->" (right associative).  Identifiers are C-style.
Whether an identifier is a variable, a constant, or a function is
decided by the signature, so parsing requires one.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ArityMismatch, FreeVariable, ParseError, UnknownSymbol
from .syntax import (
    And,
    Apply,
    Atom,
    Eq,
    Exists,
    Forall,
    Formula,
    Implies,
    Lit,
    Not,
    Or,
    Signature,
    Term,
    Var,
    free_variables,
)

__all__ = ["parse_sentence", "parse_formula"]

KEYWORDS = {"forall", "exists", "and", "or", "not"}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>-?\d+(?:\.\d+|/\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[().,=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str  # "ident", "keyword", "number", "arrow", "(", ")", ",", ".", "=", "eof"
    text: str
    pos: int


def _lex(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        pos = m.end()
        if m.lastgroup == "ws":
            continue
        value = m.group(0)
        if m.lastgroup == "ident":
            kind = "keyword" if value in KEYWORDS else "ident"
        elif m.lastgroup == "number":
            kind = "number"
        elif m.lastgroup == "arrow":
            kind = "arrow"
        else:
            kind = value
        tokens.append(_Token(kind, value, m.start()))
    tokens.append(_Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = _lex(text)
        self.index = 0
        self.sig = sig
        self.bound: list[str] = []

    # -- token helpers ------------------------------------------------------

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        tok = self.current
        self.index += 1
        return tok

    def expect(self, kind: str, expected: str) -> _Token:
        if self.current.kind != kind:
            raise ParseError(
                f"found {self.current.text or 'end of input'!r}", self.current.pos, expected
            )
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        return self.current.kind == "keyword" and self.current.text == word

    # -- grammar --------------------------------------------------------------

    def sentence(self) -> Formula:
        quants = []
        while self.at_keyword("forall") or self.at_keyword("exists"):
            word = self.advance().text
            name_tok = self.expect("ident", "a variable name")
            if self.sig.declares(name_tok.text):
                raise ParseError(
                    f"cannot quantify over declared symbol {name_tok.text!r}", name_tok.pos
                )
            self.expect(".", "'.' after the quantified variable")
            quants.append((word, name_tok.text))
            self.bound.append(name_tok.text)
        body = self.implication()
        self.expect("eof", "end of input")
        for word, name in reversed(quants):
            body = Forall(name, body) if word == "forall" else Exists(name, body)
        return body

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.current.kind == "arrow":
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at_keyword("or"):
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.negation()
        while self.at_keyword("and"):
            self.advance()
            left = And(left, self.negation())
        return left

    def negation(self) -> Formula:
        if self.at_keyword("not"):
            self.advance()
            return Not(self.negation())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.current
        if tok.kind == "(":
            self.advance()
            inner = self.implication_no_eof()
            self.expect(")", "')'")
            return inner
        if tok.kind == "ident" and self.sig.predicate_arity(tok.text) is not None:
            self.advance()
            args = self.termlist(tok)
            arity = self.sig.predicate_arity(tok.text)
            if arity != len(args):
                raise ArityMismatch(
                    f"predicate {tok.text!r} expects {arity} arguments, got {len(args)}"
                )
            return Atom(tok.text, args)
        left = self.term()
        self.expect("=", "'=' after a term")
        right = self.term()
        return Eq(left, right)

    def implication_no_eof(self) -> Formula:
        left = self.disjunction()
        if self.current.kind == "arrow":
            self.advance()
            return Implies(left, self.implication_no_eof())
        return left

    def termlist(self, head: _Token) -> tuple[Term, ...]:
        self.expect("(", f"'(' after symbol {head.text!r}")
        args = [self.term()]
        while self.current.kind == ",":
            self.advance()
            args.append(self.term())
        self.expect(")", "')' closing the argument list")
        return tuple(args)

    def term(self) -> Term:
        tok = self.current
        if tok.kind == "number":
            self.advance()
            return Lit(Fraction(tok.text))
        if tok.kind != "ident":
            raise ParseError(f"found {tok.text or 'end of input'!r}", tok.pos, "a term")
        self.advance()
        name = tok.text
        if name in self.bound:
            return Var(name)
        func_arity = self.sig.function_arity(name)
        if func_arity is not None:
            if func_arity == 0:
                return Apply(name, ())
            args = self.termlist(tok)
            if func_arity != len(args):
                raise ArityMismatch(
                    f"function {name!r} expects {func_arity} arguments, got {len(args)}"
                )
            return Apply(name, args)
        if self.sig.predicate_arity(name) is not None:
            raise ParseError(f"predicate {name!r} used as a term", tok.pos)
        if self.current.kind == "(":
            raise UnknownSymbol(f"symbol {name!r} applied to arguments but not declared")
        return Var(name)


def parse_formula(text: str, sig: Signature) -> Formula:
    """Parse without requiring closedness; free variables are allowed."""
    return _Parser(text, sig).sentence()


def parse_sentence(text: str, sig: Signature, require_sentence: bool = True) -> Formula:
    """Parse a sentence over the signature.

    With ``require_sentence`` (the default) any free variable raises;
    printing the result with ``to_text`` and reparsing yields an equal
    syntax tree.
    """
    formula = parse_formula(text, sig)
    if require_sentence:
        free = free_variables(formula)
        if free:
            raise FreeVariable(f"unbound variables: {', '.join(sorted(free))}")
    return formula
