import random
from fractions import Fraction

import pytest

from cddkit.errors import ArityMismatch, FreeVariable, ParseError, UnknownSymbol
from cddkit.modeltheory import (
    And,
    Apply,
    Atom,
    Eq,
    Exists,
    Forall,
    Implies,
    Lit,
    Not,
    Or,
    Signature,
    Var,
    free_variables,
    parse_formula,
    parse_sentence,
    to_text,
)

TRIANGLE_SIG = Signature(functions=(("P1", 2), ("P2", 1)))
PRED_SIG = Signature(predicates=(("P", 2),))


def test_orthogonality_display_form_parses():
    text = "forall v1. forall v2. forall v3. P1(v1,v2) = P2(v3)"
    ast = parse_sentence(text, TRIANGLE_SIG)
    expected = Forall(
        "v1",
        Forall(
            "v2",
            Forall(
                "v3",
                Eq(Apply("P1", (Var("v1"), Var("v2"))), Apply("P2", (Var("v3"),))),
            ),
        ),
    )
    assert ast == expected
    assert parse_sentence(to_text(ast), TRIANGLE_SIG) == ast


def test_existential_relation_sentence():
    ast = parse_sentence("exists v1. exists v2. P(v1,v2)", PRED_SIG)
    assert ast == Exists("v1", Exists("v2", Atom("P", (Var("v1"), Var("v2")))))


def test_free_variable_rejected_for_sentences():
    sig = Signature(predicates=(("P", 1),))
    with pytest.raises(FreeVariable):
        parse_sentence("P(v1)", sig)
    formula = parse_sentence("P(v1)", sig, require_sentence=False)
    assert free_variables(formula) == {"v1"}


def test_unknown_symbol():
    with pytest.raises(UnknownSymbol):
        parse_sentence("forall v. Q(v)", Signature(predicates=(("P", 1),)))


def test_arity_mismatch():
    with pytest.raises(ArityMismatch):
        parse_sentence("forall v. P(v)", PRED_SIG)
    with pytest.raises(ArityMismatch):
        parse_sentence("forall v. P1(v) = P2(v)", TRIANGLE_SIG)


def test_syntax_error_carries_position():
    sig = Signature(predicates=(("P", 1),))
    with pytest.raises(ParseError) as info:
        parse_sentence("forall . P(v)", sig)
    assert info.value.position == 7
    with pytest.raises(ParseError):
        parse_sentence("forall v. P(v", sig)


def test_cannot_quantify_over_declared_symbol():
    sig = Signature(predicates=(("P", 1),), functions=(("a", 0),))
    with pytest.raises(ParseError):
        parse_sentence("forall a. P(a)", sig)


def test_predicate_used_as_term_rejected():
    sig = Signature(predicates=(("P", 1),))
    with pytest.raises(ParseError):
        parse_sentence("forall v. P(v) = v", sig)


def test_connective_precedence():
    sig = Signature(predicates=(("P", 1), ("Q", 1), ("R", 1), ("S", 1)))
    ast = parse_sentence("forall v. P(v) and Q(v) -> not R(v) or S(v)", sig)
    body = ast.body
    assert isinstance(body, Implies)
    assert body.left == And(Atom("P", (Var("v"),)), Atom("Q", (Var("v"),)))
    assert body.right == Or(Not(Atom("R", (Var("v"),))), Atom("S", (Var("v"),)))


def test_implication_is_right_associative():
    sig = Signature(predicates=(("P", 1), ("Q", 1), ("R", 1)))
    ast = parse_sentence("forall v. P(v) -> Q(v) -> R(v)", sig)
    assert isinstance(ast.body, Implies)
    assert isinstance(ast.body.right, Implies)


def test_parentheses_override_precedence():
    sig = Signature(predicates=(("P", 1), ("Q", 1), ("R", 1)))
    ast = parse_sentence("forall v. P(v) and (Q(v) or R(v))", sig)
    assert isinstance(ast.body, And)
    assert isinstance(ast.body.right, Or)


def test_rational_literals():
    sig = Signature(functions=(("f", 1),))
    ast = parse_sentence("f(1/2) = 0.25", sig)
    assert ast == Eq(Apply("f", (Lit(Fraction(1, 2)),)), Lit(Fraction(1, 4)))
    assert parse_sentence(to_text(ast), sig) == ast


def test_constants_parse_as_nullary_applications():
    sig = Signature(predicates=(("P", 1),), functions=(("a", 0),))
    ast = parse_sentence("P(a)", sig)
    assert ast == Atom("P", (Apply("a", ()),))


def test_nested_function_terms():
    sig = Signature(functions=(("f", 1), ("g", 2), ("c", 0)))
    ast = parse_sentence("g(f(c), c) = c", sig)
    inner = Apply("f", (Apply("c", ()),))
    assert ast == Eq(Apply("g", (inner, Apply("c", ()))), Apply("c", ()))


def _random_formula(rng, sig, variables, depth):
    if depth == 0 or rng.random() < 0.3:
        choice = rng.random()
        if choice < 0.6:
            name, arity = rng.choice(sig.predicates)
            args = tuple(Var(rng.choice(variables)) for _ in range(arity))
            return Atom(name, args)
        return Eq(Var(rng.choice(variables)), Var(rng.choice(variables)))
    kind = rng.choice(["not", "and", "or", "implies"])
    if kind == "not":
        return Not(_random_formula(rng, sig, variables, depth - 1))
    left = _random_formula(rng, sig, variables, depth - 1)
    right = _random_formula(rng, sig, variables, depth - 1)
    return {"and": And, "or": Or, "implies": Implies}[kind](left, right)


def test_print_parse_roundtrip_on_random_formulas():
    rng = random.Random(2024)
    sig = Signature(predicates=(("P", 1), ("R", 2)))
    variables = ["v1", "v2", "v3"]
    for _ in range(300):
        body = _random_formula(rng, sig, variables, 3)
        ast = body
        for name in reversed(variables):
            ast = Forall(name, ast) if rng.random() < 0.5 else Exists(name, ast)
        text = to_text(ast)
        reparsed = parse_sentence(text, sig)
        assert reparsed == ast
        assert to_text(reparsed) == text


def test_parse_formula_allows_open_formulas():
    ast = parse_formula("P(v1, v2)", PRED_SIG)
    assert free_variables(ast) == {"v1", "v2"}
