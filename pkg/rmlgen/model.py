from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Mapping

from rmlgen.rdf import RDFTerm
from rmlgen.sources.base import PathExpression
from rmlgen.sources.base import ReferenceFormulation


class TermMapKind(str, Enum):
    CONSTANT = "Constant"
    REFERENCE = "Reference"
    TEMPLATE = "Template"
    FUNCTION_VALUE = "FunctionValue"
    PARENT_TRIPLES_MAP = "ParentTriplesMap"


class TermType(str, Enum):
    IRI = "IRI"
    BLANK_NODE = "BlankNode"
    LITERAL = "Literal"
    DEFAULT = "Default"


@dataclass(frozen=True)
class JoinCondition:
    child: str
    parent: str


@dataclass(frozen=True)
class FunctionCall:
    function_iri: str
    parameters: tuple[tuple[str, TermMap], ...] = ()


@dataclass(frozen=True)
class TermMap:
    kind: TermMapKind
    constant_value: RDFTerm | None = None
    reference: str | None = None
    template: str | None = None
    function_call: FunctionCall | None = None
    parent_map_id: str | None = None
    term_type: TermType = TermType.DEFAULT
    datatype: str | None = None
    language: str | None = None
    join_conditions: tuple[JoinCondition, ...] = ()
    # node of the mapping graph this term map was read from, for diagnostics
    location: str = ""

    @property
    def value_fields(self) -> dict[TermMapKind, object]:
        return {
            TermMapKind.CONSTANT: self.constant_value,
            TermMapKind.REFERENCE: self.reference,
            TermMapKind.TEMPLATE: self.template,
            TermMapKind.FUNCTION_VALUE: self.function_call,
            TermMapKind.PARENT_TRIPLES_MAP: self.parent_map_id,
        }

    def describe(self) -> str:
        value = self.value_fields[self.kind]
        return f"{self.kind.value}({value})"


@dataclass(frozen=True)
class LogicalSource:
    source: str
    reference_formulation: ReferenceFormulation
    iterator: PathExpression

    @property
    def key(self) -> tuple[str, ReferenceFormulation]:
        """ Two maps read the same tree iff their keys are equal """
        return self.source, self.reference_formulation


@dataclass(frozen=True)
class SubjectMap:
    term_map: TermMap
    classes: tuple[str, ...] = ()
    graph_maps: tuple[TermMap, ...] = ()


@dataclass(frozen=True)
class PredicateObjectMap:
    predicate: TermMap
    object: TermMap
    graph_maps: tuple[TermMap, ...] = ()


@dataclass(frozen=True)
class TriplesMap:
    id: str
    logical_source: LogicalSource
    subject_map: SubjectMap
    predicate_object_maps: tuple[PredicateObjectMap, ...] = ()

    @property
    def parent_references(self) -> list[TermMap]:
        return [
            pom.object
            for pom in self.predicate_object_maps
            if pom.object.kind is TermMapKind.PARENT_TRIPLES_MAP
        ]


@dataclass(frozen=True)
class MappingDocument:
    triples_maps: tuple[TriplesMap, ...]
    prefixes: Mapping[str, str] = field(default_factory=lambda: MappingProxyType({}))
    source_text_hash: str = ""
    base_iri: str = "http://example.com/base/"

    def __post_init__(self):
        ids = [triples_map.id for triples_map in self.triples_maps]
        if len(ids) != len(set(ids)):
            raise ValueError("triples map identifiers must be unique")

    @cached_property
    def by_id(self) -> dict[str, TriplesMap]:
        return {triples_map.id: triples_map for triples_map in self.triples_maps}

    def get(self, map_id: str) -> TriplesMap | None:
        return self.by_id.get(map_id)
