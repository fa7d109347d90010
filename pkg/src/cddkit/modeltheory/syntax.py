"""Abstract syntax for first-order predicate calculus with equality.

Terms are variables, exact-rational literals, and function applications
(constants are nullary applications).  Formulas combine predicate atoms
and equality atoms with the usual connectives and single-variable
quantifiers.  A sentence is a formula with no free variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from ..errors import ArityMismatch, UnknownSymbol

__all__ = [
    "Var",
    "Lit",
    "Apply",
    "Term",
    "Atom",
    "Eq",
    "Not",
    "And",
    "Or",
    "Implies",
    "Forall",
    "Exists",
    "Formula",
    "Signature",
    "free_variables",
    "is_sentence",
    "has_quantifier",
    "check_well_formed",
    "to_text",
]


# --- terms ---------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: Fraction


@dataclass(frozen=True)
class Apply:
    func: str
    args: tuple["Term", ...] = ()


Term = Union[Var, Lit, Apply]


# --- formulas ------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Union[Atom, Eq, Not, And, Or, Implies, Forall, Exists]


# --- signatures ------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Predicate and function symbols with fixed arities.

    Equality is built in and never declared.  Nullary function symbols
    are the language's constants.
    """

    predicates: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predicates", tuple((str(n), int(a)) for n, a in self.predicates))
        object.__setattr__(self, "functions", tuple((str(n), int(a)) for n, a in self.functions))
        names = [n for n, _ in self.predicates] + [n for n, _ in self.functions]
        if len(set(names)) != len(names):
            raise ValueError("symbol names must be unique across predicates and functions")
        for n, a in self.predicates:
            if a < 1:
                raise ValueError(f"predicate {n!r} must have arity >= 1")
        for n, a in self.functions:
            if a < 0:
                raise ValueError(f"function {n!r} must have arity >= 0")

    def predicate_arity(self, name: str) -> int | None:
        for n, a in self.predicates:
            if n == name:
                return a
        return None

    def function_arity(self, name: str) -> int | None:
        for n, a in self.functions:
            if n == name:
                return a
        return None

    def declares(self, name: str) -> bool:
        return self.predicate_arity(name) is not None or self.function_arity(name) is not None

    def to_json(self) -> dict:
        return {
            "predicates": [[n, a] for n, a in self.predicates],
            "functions": [[n, a] for n, a in self.functions],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Signature":
        return cls(
            predicates=tuple((str(n), int(a)) for n, a in doc.get("predicates", [])),
            functions=tuple((str(n), int(a)) for n, a in doc.get("functions", [])),
        )


# --- structural queries ------------------------------------------------------

def _term_free(term: Term, bound: frozenset[str], acc: set[str]) -> None:
    if isinstance(term, Var):
        if term.name not in bound:
            acc.add(term.name)
    elif isinstance(term, Apply):
        for a in term.args:
            _term_free(a, bound, acc)


def _formula_free(f: Formula, bound: frozenset[str], acc: set[str]) -> None:
    if isinstance(f, Atom):
        for t in f.args:
            _term_free(t, bound, acc)
    elif isinstance(f, Eq):
        _term_free(f.left, bound, acc)
        _term_free(f.right, bound, acc)
    elif isinstance(f, Not):
        _formula_free(f.body, bound, acc)
    elif isinstance(f, (And, Or, Implies)):
        _formula_free(f.left, bound, acc)
        _formula_free(f.right, bound, acc)
    elif isinstance(f, (Forall, Exists)):
        _formula_free(f.body, bound | {f.var}, acc)
    else:
        raise TypeError(f"not a formula: {f!r}")


def free_variables(f: Formula) -> frozenset[str]:
    acc: set[str] = set()
    _formula_free(f, frozenset(), acc)
    return frozenset(acc)


def is_sentence(f: Formula) -> bool:
    return not free_variables(f)


def has_quantifier(f: Formula) -> bool:
    if isinstance(f, (Forall, Exists)):
        return True
    if isinstance(f, Not):
        return has_quantifier(f.body)
    if isinstance(f, (And, Or, Implies)):
        return has_quantifier(f.left) or has_quantifier(f.right)
    return False


def _check_term(term: Term, sig: Signature) -> None:
    if isinstance(term, Apply):
        arity = sig.function_arity(term.func)
        if arity is None:
            raise UnknownSymbol(f"function symbol {term.func!r} not declared")
        if arity != len(term.args):
            raise ArityMismatch(f"function {term.func!r} expects {arity} arguments, got {len(term.args)}")
        for a in term.args:
            _check_term(a, sig)


def check_well_formed(f: Formula, sig: Signature) -> None:
    """Verify declared symbols and arities; raises on violation."""
    if isinstance(f, Atom):
        arity = sig.predicate_arity(f.pred)
        if arity is None:
            raise UnknownSymbol(f"predicate symbol {f.pred!r} not declared")
        if arity != len(f.args):
            raise ArityMismatch(f"predicate {f.pred!r} expects {arity} arguments, got {len(f.args)}")
        for t in f.args:
            _check_term(t, sig)
    elif isinstance(f, Eq):
        _check_term(f.left, sig)
        _check_term(f.right, sig)
    elif isinstance(f, Not):
        check_well_formed(f.body, sig)
    elif isinstance(f, (And, Or, Implies)):
        check_well_formed(f.left, sig)
        check_well_formed(f.right, sig)
    elif isinstance(f, (Forall, Exists)):
        check_well_formed(f.body, sig)
    else:
        raise TypeError(f"not a formula: {f!r}")


# --- printing ------------------------------------------------------------------

def _rational_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def term_text(term: Term) -> str:
    if isinstance(term, Var):
        return term.name
    if isinstance(term, Lit):
        return _rational_text(term.value)
    if isinstance(term, Apply):
        if not term.args:
            return term.func
        return f"{term.func}({', '.join(term_text(a) for a in term.args)})"
    raise TypeError(f"not a term: {term!r}")


_PRECEDENCE = {Implies: 1, Or: 2, And: 3, Not: 4}


def _body_text(f: Formula, parent_prec: int) -> str:
    if isinstance(f, Atom):
        return f"{f.pred}({', '.join(term_text(a) for a in f.args)})"
    if isinstance(f, Eq):
        return f"{term_text(f.left)} = {term_text(f.right)}"
    if isinstance(f, Not):
        return f"not {_body_text(f.body, _PRECEDENCE[Not])}"
    if isinstance(f, (And, Or, Implies)):
        prec = _PRECEDENCE[type(f)]
        word = {And: "and", Or: "or", Implies: "->"}[type(f)]
        right_assoc = isinstance(f, Implies)
        left = _body_text(f.left, prec + (1 if right_assoc else 0))
        right = _body_text(f.right, prec + (0 if right_assoc else 1))
        text = f"{left} {word} {right}"
        if prec < parent_prec:
            return f"({text})"
        return text
    if isinstance(f, (Forall, Exists)):
        raise ValueError("quantifiers must be prenex; cannot print an inner quantifier")
    raise TypeError(f"not a formula: {f!r}")


def to_text(f: Formula) -> str:
    """Concrete syntax for a prenex formula; inverse of the parser."""
    prefix = []
    body = f
    while isinstance(body, (Forall, Exists)):
        word = "forall" if isinstance(body, Forall) else "exists"
        prefix.append(f"{word} {body.var}.")
        body = body.body
    text = _body_text(body, 0)
    return " ".join((*prefix, text)) if prefix else text
