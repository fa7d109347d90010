"""Finite relational structures and Tarski satisfaction.

A structure is a finite ordered domain of opaque tokens or exact
rationals, relation extensions as tuple sets, and total function
tables.  For numeric domains a function may instead carry a small
arithmetic expression evaluated exactly over rationals, which keeps
satisfaction decidable and reproducible.  Quantifiers enumerate the
domain exhaustively; empty domains are rejected for quantified
sentences rather than decided vacuously.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from ..errors import (
    ArityMismatch,
    CapExceeded,
    CddError,
    DomainEmpty,
    EvaluationOverflow,
    FreeVariable,
    SchemaError,
    UnknownSymbol,
)
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
    Var,
    check_well_formed,
    free_variables,
    has_quantifier,
)

__all__ = [
    "DomainValue",
    "BuiltinFunction",
    "RelationalStructure",
    "Interpretation",
    "Theory",
    "holds",
    "satisfies",
    "check_theory",
    "enumerate_models",
    "load_structure",
    "load_theory",
]

DomainValue = Union[Fraction, str]

DEFAULT_MAGNITUDE_BOUND = 10**100
ENUMERATION_DOMAIN_CAP = 4
ENUMERATION_COUNT_CAP = 2**20

_RATIONAL_TEXT = re.compile(r"^-?\d+(?:/\d+|\.\d+)?$")

_ARITH_OPS = ("+", "-", "*")


def coerce_value(v) -> DomainValue:
    """JSON value to a domain value: numbers and numeric strings become
    exact rationals, everything else stays an opaque token."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, bool):
        raise SchemaError("booleans are not domain values")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return Fraction(str(v))
    if isinstance(v, str):
        if _RATIONAL_TEXT.match(v):
            return Fraction(v)
        return v
    raise SchemaError(f"cannot use {v!r} as a domain value")


@dataclass(frozen=True)
class BuiltinFunction:
    """Exact rational arithmetic in a tiny prefix form.

    ``body`` is a parameter name, a rational, or a nested list
    ``[op, arg, ...]`` with op one of + - *.  Results exceeding the
    magnitude bound raise instead of silently growing.
    """

    params: tuple[str, ...]
    body: object

    @property
    def arity(self) -> int:
        return len(self.params)

    def evaluate(self, args: Sequence[Fraction], bound: int) -> Fraction:
        env = dict(zip(self.params, args))
        return self._eval(self.body, env, bound)

    def _eval(self, node, env, bound) -> Fraction:
        if isinstance(node, str):
            if node in env:
                return env[node]
            if _RATIONAL_TEXT.match(node):
                return Fraction(node)
            raise SchemaError(f"unknown name {node!r} in arithmetic expression")
        if isinstance(node, (int, Fraction)):
            return Fraction(node)
        if isinstance(node, float):
            return Fraction(str(node))
        if isinstance(node, (list, tuple)) and node and node[0] in _ARITH_OPS:
            op = node[0]
            args = [self._eval(a, env, bound) for a in node[1:]]
            if not args:
                raise SchemaError(f"operator {op!r} needs arguments")
            if op == "-" and len(args) == 1:
                result = -args[0]
            else:
                result = args[0]
                for a in args[1:]:
                    if op == "+":
                        result = result + a
                    elif op == "-":
                        result = result - a
                    else:
                        result = result * a
            if abs(result.numerator) > bound or result.denominator > bound:
                raise EvaluationOverflow(
                    f"rational magnitude exceeds the configured bound {bound}"
                )
            return result
        raise SchemaError(f"malformed arithmetic expression {node!r}")


@dataclass(frozen=True)
class RelationalStructure:
    """A finite domain with relation extensions and total functions."""

    domain: tuple[DomainValue, ...]
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    functions: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        domain = tuple(coerce_value(v) for v in self.domain)
        object.__setattr__(self, "domain", domain)
        domain_set = set(domain)

        relations = {}
        for name, tuples in self.relations.items():
            normalized = frozenset(tuple(coerce_value(v) for v in t) for t in tuples)
            arities = {len(t) for t in normalized}
            if len(arities) > 1:
                raise SchemaError(f"relation {name!r} mixes tuple lengths {sorted(arities)}")
            for t in normalized:
                if not t:
                    raise SchemaError(f"relation {name!r} contains an empty tuple")
                for v in t:
                    if v not in domain_set:
                        raise SchemaError(f"relation {name!r} tuple entry {v!r} outside the domain")
            relations[name] = normalized
        object.__setattr__(self, "relations", relations)

        functions = {}
        for name, fn in self.functions.items():
            if isinstance(fn, BuiltinFunction):
                if any(not isinstance(v, Fraction) for v in domain):
                    raise SchemaError(
                        f"builtin function {name!r} requires an all-rational domain"
                    )
                functions[name] = fn
                continue
            if not isinstance(fn, dict):
                raise SchemaError(f"function {name!r} must be a table or a builtin")
            table = {}
            for key, value in fn.items():
                k = tuple(coerce_value(v) for v in key)
                table[k] = coerce_value(value)
            arities = {len(k) for k in table}
            if len(arities) > 1:
                raise SchemaError(f"function {name!r} mixes argument counts {sorted(arities)}")
            arity = arities.pop() if arities else 0
            expected = len(domain) ** arity
            if len(table) != expected:
                raise SchemaError(
                    f"function {name!r} table has {len(table)} entries, "
                    f"needs {expected} to be total"
                )
            for k, value in table.items():
                for v in k:
                    if v not in domain_set:
                        raise SchemaError(f"function {name!r} argument {v!r} outside the domain")
                if value not in domain_set:
                    raise SchemaError(f"function {name!r} value {value!r} outside the domain")
            functions[name] = table
        object.__setattr__(self, "functions", functions)

    def relation_arity(self, name: str) -> int | None:
        rel = self.relations.get(name)
        if rel is None:
            return None
        return len(next(iter(rel))) if rel else None

    def function_arity(self, name: str) -> int | None:
        fn = self.functions.get(name)
        if fn is None:
            return None
        if isinstance(fn, BuiltinFunction):
            return fn.arity
        return len(next(iter(fn))) if fn else 0


@dataclass(frozen=True)
class Interpretation:
    """Assignment of signature symbols to a structure's relations and functions."""

    signature: Signature
    predicate_map: Mapping[str, str]
    function_map: Mapping[str, str]

    def __post_init__(self):
        for name, _ in self.signature.predicates:
            if name not in self.predicate_map:
                raise SchemaError(f"interpretation misses predicate symbol {name!r}")
        for name, _ in self.signature.functions:
            if name not in self.function_map:
                raise SchemaError(f"interpretation misses function symbol {name!r}")

    @classmethod
    def identity(cls, sig: Signature) -> "Interpretation":
        return cls(
            signature=sig,
            predicate_map={n: n for n, _ in sig.predicates},
            function_map={n: n for n, _ in sig.functions},
        )

    def check_against(self, struct: RelationalStructure) -> None:
        for name, arity in self.signature.predicates:
            target = self.predicate_map[name]
            if target not in struct.relations:
                raise UnknownSymbol(f"structure has no relation {target!r} for symbol {name!r}")
            actual = struct.relation_arity(target)
            if actual is not None and actual != arity:
                raise ArityMismatch(
                    f"relation {target!r} has arity {actual}, symbol {name!r} needs {arity}"
                )
        for name, arity in self.signature.functions:
            target = self.function_map[name]
            if target not in struct.functions:
                raise UnknownSymbol(f"structure has no function {target!r} for symbol {name!r}")
            actual = struct.function_arity(target)
            if actual is not None and actual != arity:
                raise ArityMismatch(
                    f"function {target!r} has arity {actual}, symbol {name!r} needs {arity}"
                )


@dataclass(frozen=True)
class Theory:
    """A named, ordered list of sentences over one signature."""

    name: str
    signature: Signature
    sentences: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        for s in self.sentences:
            check_well_formed(s, self.signature)
            if free_variables(s):
                raise FreeVariable(f"theory {self.name!r} contains a non-sentence")


# --- evaluation -----------------------------------------------------------------

def _eval_term(term, struct, fmap, env, bound):
    if isinstance(term, Var):
        try:
            return env[term.name]
        except KeyError:
            raise FreeVariable(f"no value for variable {term.name!r}") from None
    if isinstance(term, Lit):
        return term.value
    if isinstance(term, Apply):
        target = fmap.get(term.func, term.func)
        fn = struct.functions.get(target)
        if fn is None:
            raise UnknownSymbol(f"structure has no function {target!r}")
        args = tuple(_eval_term(a, struct, fmap, env, bound) for a in term.args)
        if isinstance(fn, BuiltinFunction):
            if any(not isinstance(a, Fraction) for a in args):
                raise CddError(f"builtin function {target!r} applied to a non-numeric value")
            return fn.evaluate(args, bound)
        try:
            return fn[args]
        except KeyError:
            raise CddError(f"function {target!r} undefined on {args!r}") from None
    raise TypeError(f"not a term: {term!r}")


def _eval_formula(f, struct, pmap, fmap, env, bound):
    if isinstance(f, Atom):
        target = pmap.get(f.pred, f.pred)
        rel = struct.relations.get(target)
        if rel is None:
            raise UnknownSymbol(f"structure has no relation {target!r}")
        args = tuple(_eval_term(a, struct, fmap, env, bound) for a in f.args)
        return args in rel
    if isinstance(f, Eq):
        return _eval_term(f.left, struct, fmap, env, bound) == _eval_term(
            f.right, struct, fmap, env, bound
        )
    if isinstance(f, Not):
        return not _eval_formula(f.body, struct, pmap, fmap, env, bound)
    if isinstance(f, And):
        return _eval_formula(f.left, struct, pmap, fmap, env, bound) and _eval_formula(
            f.right, struct, pmap, fmap, env, bound
        )
    if isinstance(f, Or):
        return _eval_formula(f.left, struct, pmap, fmap, env, bound) or _eval_formula(
            f.right, struct, pmap, fmap, env, bound
        )
    if isinstance(f, Implies):
        return (not _eval_formula(f.left, struct, pmap, fmap, env, bound)) or _eval_formula(
            f.right, struct, pmap, fmap, env, bound
        )
    if isinstance(f, Forall):
        for e in struct.domain:
            env2 = dict(env)
            env2[f.var] = e
            if not _eval_formula(f.body, struct, pmap, fmap, env2, bound):
                return False
        return True
    if isinstance(f, Exists):
        for e in struct.domain:
            env2 = dict(env)
            env2[f.var] = e
            if _eval_formula(f.body, struct, pmap, fmap, env2, bound):
                return True
        return False
    raise TypeError(f"not a formula: {f!r}")


def holds(
    struct: RelationalStructure,
    formula: Formula,
    interp: Interpretation | None = None,
    assignment: Mapping[str, DomainValue] | None = None,
    max_magnitude: int = DEFAULT_MAGNITUDE_BOUND,
) -> bool:
    """Truth of a possibly open formula under an explicit variable assignment."""
    if has_quantifier(formula) and not struct.domain:
        raise DomainEmpty("quantified formula over an empty domain")
    pmap, fmap = {}, {}
    if interp is not None:
        interp.check_against(struct)
        pmap = dict(interp.predicate_map)
        fmap = dict(interp.function_map)
    env = {k: coerce_value(v) for k, v in (assignment or {}).items()}
    return _eval_formula(formula, struct, pmap, fmap, env, max_magnitude)


def satisfies(
    struct: RelationalStructure,
    sentence: Formula,
    interp: Interpretation | None = None,
    max_magnitude: int = DEFAULT_MAGNITUDE_BOUND,
) -> bool:
    """Tarski truth of a sentence in a structure under an interpretation.

    Compositional recursion with exhaustive quantification over the
    finite domain; deterministic by construction.
    """
    free = free_variables(sentence)
    if free:
        raise FreeVariable(f"not a sentence, free variables: {', '.join(sorted(free))}")
    return holds(struct, sentence, interp, None, max_magnitude)


def check_theory(
    theory: Theory,
    struct: RelationalStructure,
    interp: Interpretation | None = None,
    max_magnitude: int = DEFAULT_MAGNITUDE_BOUND,
) -> list[bool]:
    """Per-sentence truth values; the structure models the theory iff all hold."""
    if interp is None:
        interp = Interpretation.identity(theory.signature)
    return [satisfies(struct, s, interp, max_magnitude) for s in theory.sentences]


# --- exhaustive model enumeration ---------------------------------------------

def enumerate_models(
    sig: Signature,
    sentence: Formula,
    domain_size: int,
    domain_cap: int = ENUMERATION_DOMAIN_CAP,
    count_cap: int = ENUMERATION_COUNT_CAP,
) -> list[RelationalStructure]:
    """All structures over a canonical domain of the given size that
    satisfy the sentence.

    Enumeration order is deterministic: relation extensions run through
    ascending bitmask order per symbol (tuple index = bit index), with
    later symbols cycling fastest; function tables likewise.
    """
    if domain_size < 1:
        raise SchemaError("domain size must be at least 1")
    if domain_size > domain_cap:
        raise CapExceeded(f"domain size {domain_size} exceeds cap {domain_cap}")
    for name, arity in sig.functions:
        if arity > 2:
            raise CapExceeded(f"function symbol {name!r} of arity {arity} > 2 not enumerable")
    check_well_formed(sentence, sig)
    if free_variables(sentence):
        raise FreeVariable("enumerate_models needs a sentence")

    domain = tuple(f"e{i}" for i in range(domain_size))

    total = 1
    rel_tuples = {}
    for name, arity in sig.predicates:
        tuples = list(itertools.product(domain, repeat=arity))
        rel_tuples[name] = tuples
        total *= 2 ** len(tuples)
    fn_inputs = {}
    for name, arity in sig.functions:
        inputs = list(itertools.product(domain, repeat=arity))
        fn_inputs[name] = inputs
        total *= domain_size ** len(inputs)
    if total > count_cap:
        raise CapExceeded(f"{total} candidate structures exceed cap {count_cap}")

    interp = Interpretation.identity(sig)
    pred_names = [n for n, _ in sig.predicates]
    fn_names = [n for n, _ in sig.functions]

    models = []
    rel_choices = [range(2 ** len(rel_tuples[n])) for n in pred_names]
    fn_choices = [
        itertools.product(domain, repeat=len(fn_inputs[n])) for n in fn_names
    ]
    for combo in itertools.product(*rel_choices, *[list(c) for c in fn_choices]):
        masks = combo[: len(pred_names)]
        outputs = combo[len(pred_names):]
        relations = {}
        for name, mask in zip(pred_names, masks):
            tuples = rel_tuples[name]
            relations[name] = frozenset(t for i, t in enumerate(tuples) if mask >> i & 1)
        functions = {}
        for name, out in zip(fn_names, outputs):
            functions[name] = dict(zip(fn_inputs[name], out))
        struct = RelationalStructure(domain=domain, relations=relations, functions=functions)
        if satisfies(struct, sentence, interp):
            models.append(struct)
    return models


# --- JSON loading ----------------------------------------------------------------

def _decode_function(name: str, doc) -> object:
    if isinstance(doc, dict) and "params" in doc:
        return BuiltinFunction(params=tuple(doc["params"]), body=doc["body"])
    if isinstance(doc, dict) and "table" in doc:
        table = {}
        for entry in doc["table"]:
            if not isinstance(entry, list) or len(entry) != 2:
                raise SchemaError(f"function {name!r} table entries must be [args, value]")
            args, value = entry
            table[tuple(args)] = value
        return table
    if isinstance(doc, (int, float, str)):
        # a bare value is a constant (nullary table)
        return {(): doc}
    raise SchemaError(f"cannot decode function {name!r}")


def load_structure(text_or_doc) -> tuple[Signature | None, RelationalStructure]:
    """Load ``{"signature"?, "domain", "relations"?, "functions"?}``."""
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, (str, bytes)) else text_or_doc
    if not isinstance(doc, dict) or "domain" not in doc:
        raise SchemaError("structure document needs a 'domain' array")
    sig = Signature.from_json(doc["signature"]) if "signature" in doc else None
    relations = {
        name: [tuple(t) for t in tuples] for name, tuples in doc.get("relations", {}).items()
    }
    functions = {
        name: _decode_function(name, fdoc) for name, fdoc in doc.get("functions", {}).items()
    }
    struct = RelationalStructure(
        domain=tuple(doc["domain"]), relations=relations, functions=functions
    )
    if sig is not None:
        Interpretation.identity(sig).check_against(struct)
    return sig, struct


def load_theory(text_or_doc, signature: Signature | None = None) -> Theory:
    """Load ``{"name"?, "signature"?, "sentences": [...]}``; sentences are
    parsed against the document's signature or the one supplied."""
    from .parser import parse_sentence

    doc = json.loads(text_or_doc) if isinstance(text_or_doc, (str, bytes)) else text_or_doc
    if not isinstance(doc, dict) or "sentences" not in doc:
        raise SchemaError("theory document needs a 'sentences' array")
    if "signature" in doc:
        signature = Signature.from_json(doc["signature"])
    if signature is None:
        raise SchemaError("theory document needs a signature")
    sentences = tuple(parse_sentence(text, signature) for text in doc["sentences"])
    return Theory(
        name=str(doc.get("name", "theory")), signature=signature, sentences=sentences
    )
