from __future__ import annotations

import json
from typing import TYPE_CHECKING
from typing import Any
from typing import Iterable

from rmlgen.rdf import RDFTerm
from rmlgen.rdf import TripleSet

if TYPE_CHECKING:
    from rmlgen.engine import IntermediateNode


def serialize_ntriples(triples: TripleSet) -> bytes:
    """ Canonical N-Triples: one triple per line, UTF-8, "\\n" line ends """
    return "".join(f"{triple.n3()}\n" for triple in triples).encode("utf-8")


def _term_id(term: RDFTerm) -> str:
    return f"_:{term.lexical}" if term.is_blank else term.lexical


def _object_value(value: RDFTerm | IntermediateNode) -> dict[str, Any]:
    if not isinstance(value, RDFTerm):
        return _node_object(value)

    if not value.is_literal:
        return {"@id": _term_id(value)}

    literal = {"@value": value.lexical}

    if value.language:
        literal["@language"] = value.language
    elif value.datatype:
        literal["@type"] = value.datatype

    return literal


def _node_object(node: IntermediateNode) -> dict[str, Any]:
    obj: dict[str, Any] = {"@id": _term_id(node.subject)}

    if node.type_iris:
        obj["@type"] = [type_iri.lexical for type_iri in node.type_iris]

    for predicate, values in node.properties.items():
        obj.setdefault(predicate.lexical, []).extend(_object_value(value) for value in values)

    return obj


def serialize_jsonld(nodes: Iterable[IntermediateNode], indent: int | None = 2) -> str:
    """
    Expanded JSON-LD: one node object per result node, nested children
    inline under the predicate that links them.
    """
    return json.dumps([_node_object(node) for node in nodes], ensure_ascii=False, indent=indent)
