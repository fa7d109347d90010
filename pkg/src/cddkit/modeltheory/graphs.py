"""Conceptual graphs and their translation to existential sentences.

A conceptual graph is bipartite: concept nodes carry a type and an
optional referent, relation nodes connect ordered lists of concept
nodes.  First-order only: a relation node may not reference another
relation node.  Translation introduces one existential variable per
unfixed concept, one constant (or rational literal) per fixed referent,
a monadic type atom per concept, and one relation atom per relation
node.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import HigherOrderGraph, SchemaError
from .syntax import And, Apply, Atom, Exists, Formula, Lit, Signature, Term, Var

__all__ = ["ConceptNode", "RelationNode", "ConceptualGraph", "graph_to_sentence", "load_graph"]

_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_RATIONAL_TEXT = re.compile(r"^-?\d+(?:/\d+|\.\d+)?$")


@dataclass(frozen=True)
class ConceptNode:
    id: str
    type: str
    referent: str | Fraction | None = None

    def __post_init__(self):
        if not _IDENT.match(self.type):
            raise SchemaError(f"concept type {self.type!r} is not an identifier")


@dataclass(frozen=True)
class RelationNode:
    name: str
    args: tuple[str, ...]  # concept node ids, ordered
    id: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not _IDENT.match(self.name):
            raise SchemaError(f"relation name {self.name!r} is not an identifier")
        if len(self.args) < 1:
            raise SchemaError(f"relation {self.name!r} needs at least one argument")


@dataclass(frozen=True)
class ConceptualGraph:
    concepts: tuple[ConceptNode, ...]
    relations: tuple[RelationNode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        object.__setattr__(self, "relations", tuple(self.relations))
        concept_ids = [c.id for c in self.concepts]
        if len(set(concept_ids)) != len(concept_ids):
            raise SchemaError("concept ids must be unique")
        relation_ids = {r.id for r in self.relations if r.id is not None}
        for r in self.relations:
            for arg in r.args:
                if arg in relation_ids:
                    raise HigherOrderGraph(
                        f"relation {r.name!r} references relation node {arg!r}; "
                        "only concept nodes may be arguments"
                    )
                if arg not in concept_ids:
                    raise SchemaError(f"relation {r.name!r} references unknown node {arg!r}")


def graph_to_sentence(graph: ConceptualGraph) -> tuple[Signature, Formula]:
    """Model-theoretic reading of a conceptual graph.

    Returns the derived signature and a closed existential sentence:
    a conjunction of one type atom per concept and one atom per
    relation node, quantifying over concepts without referents.
    """
    terms: dict[str, Term] = {}
    variables = []
    constants = []
    counter = 0
    for c in graph.concepts:
        if c.referent is None:
            counter += 1
            name = f"v{counter}"
            variables.append(name)
            terms[c.id] = Var(name)
        elif isinstance(c.referent, Fraction):
            terms[c.id] = Lit(c.referent)
        elif _RATIONAL_TEXT.match(str(c.referent)):
            terms[c.id] = Lit(Fraction(str(c.referent)))
        else:
            ref = str(c.referent)
            if not _IDENT.match(ref):
                raise SchemaError(f"referent {ref!r} is neither a rational nor an identifier")
            constants.append(ref)
            terms[c.id] = Apply(ref, ())

    predicates: dict[str, int] = {}
    for c in graph.concepts:
        prior = predicates.setdefault(c.type, 1)
        if prior != 1:
            raise SchemaError(f"symbol {c.type!r} used with conflicting arities")
    for r in graph.relations:
        prior = predicates.setdefault(r.name, len(r.args))
        if prior != len(r.args):
            raise SchemaError(f"symbol {r.name!r} used with conflicting arities")

    sig = Signature(
        predicates=tuple(sorted(predicates.items())),
        functions=tuple((name, 0) for name in sorted(set(constants))),
    )

    atoms: list[Formula] = [Atom(c.type, (terms[c.id],)) for c in graph.concepts]
    atoms += [Atom(r.name, tuple(terms[a] for a in r.args)) for r in graph.relations]
    body = atoms[0]
    for atom in atoms[1:]:
        body = And(body, atom)
    for name in reversed(variables):
        body = Exists(name, body)
    return sig, body


def load_graph(text_or_doc) -> ConceptualGraph:
    """Load ``{"concepts": [{"id","type","referent"?}], "relations": [...]}``."""
    doc = json.loads(text_or_doc) if isinstance(text_or_doc, (str, bytes)) else text_or_doc
    if not isinstance(doc, dict) or "concepts" not in doc:
        raise SchemaError("graph document needs a 'concepts' array")
    concepts = []
    for entry in doc["concepts"]:
        try:
            concepts.append(
                ConceptNode(
                    id=str(entry["id"]),
                    type=str(entry["type"]),
                    referent=entry.get("referent"),
                )
            )
        except KeyError as exc:
            raise SchemaError(f"concept entry missing key {exc.args[0]!r}") from exc
    relations = []
    for entry in doc.get("relations", []):
        try:
            relations.append(
                RelationNode(
                    name=str(entry["name"]),
                    args=tuple(str(a) for a in entry["args"]),
                    id=str(entry["id"]) if "id" in entry else None,
                )
            )
        except KeyError as exc:
            raise SchemaError(f"relation entry missing key {exc.args[0]!r}") from exc
    return ConceptualGraph(concepts=tuple(concepts), relations=tuple(relations))
