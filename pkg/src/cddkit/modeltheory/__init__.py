"""First-order predicate calculus with equality over finite structures."""

from .graphs import ConceptNode, ConceptualGraph, RelationNode, graph_to_sentence, load_graph
from .parser import parse_formula, parse_sentence
from .structures import (
    BuiltinFunction,
    Interpretation,
    RelationalStructure,
    Theory,
    check_theory,
    enumerate_models,
    holds,
    load_structure,
    load_theory,
    satisfies,
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
    Term,
    Var,
    check_well_formed,
    free_variables,
    has_quantifier,
    is_sentence,
    to_text,
)

__all__ = [
    "And", "Apply", "Atom", "BuiltinFunction", "ConceptNode", "ConceptualGraph",
    "Eq", "Exists", "Forall", "Formula", "Implies", "Interpretation", "Lit",
    "Not", "Or", "RelationNode", "RelationalStructure", "Signature", "Term",
    "Theory", "Var", "check_theory", "check_well_formed", "enumerate_models",
    "free_variables", "graph_to_sentence", "has_quantifier", "holds",
    "is_sentence", "load_graph", "load_structure", "load_theory",
    "parse_formula", "parse_sentence", "satisfies", "to_text",
]
