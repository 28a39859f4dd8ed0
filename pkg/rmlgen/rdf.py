from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING
from typing import Iterable
from typing import Iterator
from typing import NamedTuple

import rdflib
from rdflib import BNode
from rdflib import Literal
from rdflib import URIRef
from rdflib.term import Node

from rmlgen.namespaces import RDF_TYPE
from rmlgen.namespaces import XSD

if TYPE_CHECKING:
    from rmlgen.engine import IntermediateNode

XSD_STRING = str(XSD.string)


class TermKind(str, Enum):
    IRI = "IRI"
    BLANK_NODE = "BlankNode"
    LITERAL = "Literal"


@dataclass(frozen=True, slots=True)
class RDFTerm:
    kind: TermKind
    lexical: str
    datatype: str | None = None
    language: str | None = None

    def __post_init__(self):
        if self.language is not None and (self.kind is not TermKind.LITERAL or self.datatype):
            raise ValueError("a language tag requires a literal without datatype")

        if self.datatype is not None and self.kind is not TermKind.LITERAL:
            raise ValueError("only literals carry a datatype")

    @classmethod
    def iri(cls, value: str) -> RDFTerm:
        return cls(TermKind.IRI, value)

    @classmethod
    def blank(cls, label: str) -> RDFTerm:
        return cls(TermKind.BLANK_NODE, label)

    @classmethod
    def literal(cls, lexical: str, datatype: str | None = None, language: str | None = None) -> RDFTerm:
        """ xsd:string is the datatype of every simple literal, so it is not stored """
        if datatype == XSD_STRING:
            datatype = None

        return cls(TermKind.LITERAL, lexical, datatype, language or None)

    @property
    def is_iri(self) -> bool:
        return self.kind is TermKind.IRI

    @property
    def is_blank(self) -> bool:
        return self.kind is TermKind.BLANK_NODE

    @property
    def is_literal(self) -> bool:
        return self.kind is TermKind.LITERAL

    @property
    def is_plain(self) -> bool:
        return self.is_literal and self.datatype is None and self.language is None

    def n3(self) -> str:
        """ N-Triples form of the term """
        if self.kind is TermKind.IRI:
            return f"<{_escape_iri(self.lexical)}>"

        if self.kind is TermKind.BLANK_NODE:
            return f"_:{self.lexical}"

        text = f'"{_escape_string(self.lexical)}"'

        if self.language:
            return f"{text}@{self.language}"

        if self.datatype:
            return f"{text}^^<{_escape_iri(self.datatype)}>"

        return text

    def __str__(self) -> str:
        return self.n3()


RDF_TYPE_TERM = RDFTerm.iri(RDF_TYPE)

_STRING_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r"}
_IRI_FORBIDDEN = set('<>"{}|^`\\ ')


def _escape_string(value: str) -> str:
    out = []

    for char in value:
        if char in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[char])
        elif (ord(char) < 0x20 and char != "\t") or ord(char) == 0x7F:
            out.append(f"\\u{ord(char):04X}")
        else:
            out.append(char)

    return "".join(out)


def _escape_iri(value: str) -> str:
    return "".join(
        f"\\u{ord(char):04X}" if char in _IRI_FORBIDDEN or ord(char) <= 0x20 else char for char in value
    )


_NORMALIZE_FLAG = threading.Lock()


@contextmanager
def lexical_literals() -> Iterator[None]:
    """ rdflib keeps typed literals in their written lexical form inside this block """
    with _NORMALIZE_FLAG:
        previous = rdflib.NORMALIZE_LITERALS
        rdflib.NORMALIZE_LITERALS = False
        try:
            yield
        finally:
            rdflib.NORMALIZE_LITERALS = previous


def term_from_rdflib(term: Node) -> RDFTerm:
    if isinstance(term, URIRef):
        return RDFTerm.iri(str(term))

    if isinstance(term, BNode):
        return RDFTerm.blank(str(term))

    if isinstance(term, Literal):
        datatype = str(term.datatype) if term.datatype is not None else None
        return RDFTerm.literal(str(term), datatype=datatype, language=term.language)

    raise ValueError(f"not an RDF term: {term!r}")


class Triple(NamedTuple):
    subject: RDFTerm
    predicate: RDFTerm
    object: RDFTerm

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


class TripleSet:
    """ Deduplicated triples kept in first-occurrence order """

    __slots__ = ("_triples",)

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples = dict.fromkeys(triples)

        for triple in self._triples:
            if triple.subject.is_literal or not triple.predicate.is_iri:
                raise ValueError(f"malformed triple {triple}")

    @property
    def triples(self) -> tuple[Triple, ...]:
        return tuple(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self._triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TripleSet):
            return NotImplemented
        return self._triples.keys() == other._triples.keys()

    def __hash__(self) -> int:
        return hash(frozenset(self._triples))

    def __repr__(self) -> str:
        return f"TripleSet({len(self._triples)} triples)"


def _emit(node: IntermediateNode, out: list[Triple]) -> None:
    for type_iri in node.type_iris:
        out.append(Triple(node.subject, RDF_TYPE_TERM, type_iri))

    for predicate, values in node.properties.items():
        for value in values:
            if isinstance(value, RDFTerm):
                out.append(Triple(node.subject, predicate, value))
            else:
                out.append(Triple(node.subject, predicate, value.subject))
                _emit(value, out)


def flatten(nodes: Iterable[IntermediateNode]) -> TripleSet:
    """
    Turn nested result nodes into triples: types first, then properties in
    mapping order, nested children depth-first right after their link triple.
    """
    out: list[Triple] = []

    for node in nodes:
        _emit(node, out)

    return TripleSet(out)
