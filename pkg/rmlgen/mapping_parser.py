from __future__ import annotations

import hashlib
import itertools
from types import MappingProxyType
from typing import Iterable

from loguru import logger
from rdflib import BNode
from rdflib import Graph
from rdflib import Literal
from rdflib import URIRef
from rdflib.term import Node

from rmlgen.errors import MappingSyntaxError
from rmlgen.errors import ModelError
from rmlgen.errors import PathError
from rmlgen.errors import UnknownTriplesMap
from rmlgen.model import FunctionCall
from rmlgen.model import JoinCondition
from rmlgen.model import LogicalSource
from rmlgen.model import MappingDocument
from rmlgen.model import PredicateObjectMap
from rmlgen.model import SubjectMap
from rmlgen.model import TermMap
from rmlgen.model import TermMapKind
from rmlgen.model import TermType
from rmlgen.model import TriplesMap
from rmlgen.namespaces import FNML
from rmlgen.namespaces import FNO
from rmlgen.namespaces import FNO_LEGACY
from rmlgen.namespaces import QL
from rmlgen.namespaces import RML
from rmlgen.namespaces import RR
from rmlgen.rdf import RDFTerm
from rmlgen.rdf import lexical_literals
from rmlgen.sources import ReferenceFormulation
from rmlgen.sources import path_expression

DEFAULT_BASE_IRI = "http://example.com/base/"

_FORMULATIONS = {
    QL.JSONPath: ReferenceFormulation.JSONPATH,
    QL.XPath: ReferenceFormulation.XPATH,
}

_TERM_TYPES = {
    RR.IRI: TermType.IRI,
    RR.BlankNode: TermType.BLANK_NODE,
    RR.Literal: TermType.LITERAL,
}

_EXECUTES = {FNO.executes, FNO_LEGACY.executes}


class OrderedGraph(Graph):
    """ Graph that remembers the order in which the parser first met each subject """

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.subject_order: dict[Node, int] = {}

    def add(self, triple):
        self.subject_order.setdefault(triple[0], len(self.subject_order))
        return super().add(triple)


def _read_graph(text: str, base_iri: str) -> OrderedGraph:
    graph = OrderedGraph(bind_namespaces="none")

    try:
        with lexical_literals():
            graph.parse(data=text, format="turtle", publicID=base_iri)
    except Exception as exc:
        line = getattr(exc, "lines", None)
        column = None

        source, position = getattr(exc, "_str", None), getattr(exc, "_i", None)
        if isinstance(source, str) and isinstance(position, int):
            column = position - source.rfind("\n", 0, position)

        message = getattr(exc, "why", None) or str(exc)
        raise MappingSyntaxError(
            f"malformed Turtle: {message}", line=None if line is None else line + 1, column=column
        ) from exc

    return graph


class _DocumentReader:
    """ Walks the parsed mapping graph and builds the immutable model """

    def __init__(self, graph: OrderedGraph):
        self.graph = graph
        self._blank_ids: dict[Node, str] = {}

    def _map_id(self, node: Node) -> str:
        if isinstance(node, BNode):
            return self._blank_ids.setdefault(node, f"_:tm{len(self._blank_ids)}")
        return str(node)

    def _literal(self, node: Node, prop: URIRef, where: str) -> str | None:
        value = self.graph.value(node, prop)

        if value is None:
            return None

        if not isinstance(value, Literal):
            raise ModelError(f"{where}: {prop.n3()} must be a literal, got {value.n3()}")

        return str(value)

    def _single(self, node: Node, prop: URIRef, where: str) -> Node | None:
        values = list(self.graph.objects(node, prop))

        if len(values) > 1:
            raise ModelError(f"{where}: more than one {prop.n3()}")

        return values[0] if values else None

    def triples_map_nodes(self) -> list[Node]:
        function_nodes = set(self.graph.objects(None, FNML.functionValue))
        candidates = {
            node
            for node in itertools.chain(
                self.graph.subjects(RML.logicalSource, None),
                self.graph.subjects(RR.logicalTable, None),
                self.graph.subjects(RR.subjectMap, None),
                self.graph.subjects(RR.subject, None),
            )
            if node not in function_nodes
        }

        order = self.graph.subject_order
        return sorted(candidates, key=lambda node: order.get(node, len(order)))

    def read(self) -> list[TriplesMap]:
        nodes = self.triples_map_nodes()

        for node in nodes:
            self._map_id(node)

        return [self.triples_map(node) for node in nodes]

    def triples_map(self, node: Node) -> TriplesMap:
        map_id = self._map_id(node)

        if self.graph.value(node, RR.logicalTable) is not None:
            raise ModelError(f"{map_id}: rr:logicalTable sources are not supported, use rml:logicalSource")

        subject_nodes = list(self.graph.objects(node, RR.subjectMap))
        subject_constants = list(self.graph.objects(node, RR.subject))

        if len(subject_nodes) + len(subject_constants) == 0:
            raise ModelError(f"{map_id}: triples map has no subject map")

        if len(subject_nodes) + len(subject_constants) > 1:
            raise ModelError(f"{map_id}: triples map has more than one subject map")

        if subject_constants:
            subject_map = SubjectMap(term_map=self.constant(subject_constants[0], f"{map_id} rr:subject"))
        else:
            subject_map = self.subject_map(subject_nodes[0], f"{map_id} subjectMap")

        poms = []
        for position, pom_node in enumerate(self.graph.objects(node, RR.predicateObjectMap)):
            poms.extend(self.predicate_object_maps(pom_node, f"{map_id} predicateObjectMap[{position}]"))

        return TriplesMap(
            id=map_id,
            logical_source=self.logical_source(node, map_id),
            subject_map=subject_map,
            predicate_object_maps=tuple(poms),
        )

    def logical_source(self, node: Node, map_id: str) -> LogicalSource:
        source_node = self._single(node, RML.logicalSource, map_id)

        if source_node is None:
            raise ModelError(f"{map_id}: triples map has no rml:logicalSource")

        where = f"{map_id} logicalSource"
        source = self.graph.value(source_node, RML.source)

        if source is None:
            raise ModelError(f"{where}: missing rml:source")

        if not isinstance(source, Literal):
            raise ModelError(f"{where}: only file sources are supported, got {source.n3()}")

        formulation_node = self.graph.value(source_node, RML.referenceFormulation)

        if formulation_node not in _FORMULATIONS:
            named = formulation_node.n3() if formulation_node is not None else "nothing"
            raise ModelError(f"{where}: reference formulation {named} is not JSONPath or XPath")

        formulation = _FORMULATIONS[formulation_node]
        iterator_text = self._literal(source_node, RML.iterator, where)

        if iterator_text is None:
            if formulation is not ReferenceFormulation.JSONPATH:
                raise ModelError(f"{where}: an XPath logical source needs an rml:iterator")
            iterator_text = "$"

        try:
            iterator = path_expression(formulation, iterator_text)
        except PathError as exc:
            raise ModelError(f"{where}: {exc}") from exc

        if iterator.is_relative:
            raise ModelError(f"{where}: iterator {iterator_text!r} must be absolute")

        return LogicalSource(source=str(source), reference_formulation=formulation, iterator=iterator)

    def subject_map(self, node: Node, where: str) -> SubjectMap:
        classes = tuple(str(value) for value in self.graph.objects(node, RR["class"]))

        return SubjectMap(
            term_map=self.term_map(node, where),
            classes=classes,
            graph_maps=self.graph_maps(node, where),
        )

    def graph_maps(self, node: Node, where: str) -> tuple[TermMap, ...]:
        maps = [self.constant(value, f"{where} rr:graph") for value in self.graph.objects(node, RR.graph)]
        maps.extend(
            self.term_map(value, f"{where} graphMap") for value in self.graph.objects(node, RR.graphMap)
        )
        return tuple(maps)

    def predicate_object_maps(self, node: Node, where: str) -> Iterable[PredicateObjectMap]:
        predicates = [self.constant(value, f"{where} rr:predicate") for value in self.graph.objects(node, RR.predicate)]
        predicates.extend(
            self.term_map(value, f"{where} predicateMap")
            for value in self.graph.objects(node, RR.predicateMap)
        )

        objects = [self.constant(value, f"{where} rr:object") for value in self.graph.objects(node, RR.object)]
        objects.extend(
            self.term_map(value, f"{where} objectMap") for value in self.graph.objects(node, RR.objectMap)
        )

        if not predicates or not objects:
            raise ModelError(f"{where}: a predicate-object map needs a predicate and an object")

        graph_maps = self.graph_maps(node, where)

        return [
            PredicateObjectMap(predicate=predicate, object=obj, graph_maps=graph_maps)
            for predicate, obj in itertools.product(predicates, objects)
        ]

    def constant(self, value: Node, where: str) -> TermMap:
        return TermMap(kind=TermMapKind.CONSTANT, constant_value=self.rdf_term(value, where), location=where)

    def rdf_term(self, value: Node, where: str) -> RDFTerm:
        if isinstance(value, URIRef):
            return RDFTerm.iri(str(value))

        if isinstance(value, Literal):
            datatype = str(value.datatype) if value.datatype else None
            return RDFTerm.literal(str(value), datatype=datatype, language=value.language)

        raise ModelError(f"{where}: constant must be an IRI or a literal, got {value.n3()}")

    def term_map(self, node: Node, where: str) -> TermMap:
        if isinstance(node, Literal):
            raise ModelError(f"{where}: expected a term map, got the literal {node.n3()}")

        if self.graph.value(node, RR.column) is not None:
            raise ModelError(f"{where}: rr:column is not supported, use rml:reference")

        values = {
            TermMapKind.CONSTANT: self._single(node, RR.constant, where),
            TermMapKind.REFERENCE: self._literal(node, RML.reference, where),
            TermMapKind.TEMPLATE: self._literal(node, RR.template, where),
            TermMapKind.FUNCTION_VALUE: self._single(node, FNML.functionValue, where),
            TermMapKind.PARENT_TRIPLES_MAP: self._single(node, RR.parentTriplesMap, where),
        }
        present = [kind for kind, value in values.items() if value is not None]

        if len(present) != 1:
            found = ", ".join(kind.value for kind in present) or "none"
            raise ModelError(f"{where}: term map needs exactly one of constant, reference, template, function or parent map (found {found})")

        kind = present[0]
        term_type_node = self.graph.value(node, RR.termType)

        if term_type_node is not None and term_type_node not in _TERM_TYPES:
            raise ModelError(f"{where}: unknown rr:termType {term_type_node.n3()}")

        datatype = self.graph.value(node, RR.datatype)
        language = self._literal(node, RR.language, where)
        joins = tuple(
            JoinCondition(
                child=self._literal(join, RR.child, where) or "",
                parent=self._literal(join, RR.parent, where) or "",
            )
            for join in self.graph.objects(node, RR.joinCondition)
        )

        fields = {}
        if kind is TermMapKind.CONSTANT:
            fields["constant_value"] = self.rdf_term(values[kind], where)
        elif kind is TermMapKind.REFERENCE:
            fields["reference"] = values[kind]
        elif kind is TermMapKind.TEMPLATE:
            fields["template"] = values[kind]
        elif kind is TermMapKind.FUNCTION_VALUE:
            fields["function_call"] = self.function_call(values[kind], f"{where} functionValue")
        else:
            fields["parent_map_id"] = self._map_id(values[kind])

        return TermMap(
            kind=kind,
            term_type=_TERM_TYPES.get(term_type_node, TermType.DEFAULT),
            datatype=str(datatype) if datatype is not None else None,
            language=language,
            join_conditions=joins,
            location=where,
            **fields,
        )

    def function_call(self, node: Node, where: str) -> FunctionCall:
        function_iri = None
        parameters = []

        for position, pom_node in enumerate(self.graph.objects(node, RR.predicateObjectMap)):
            for pom in self.predicate_object_maps(pom_node, f"{where} parameter[{position}]"):
                predicate = pom.predicate.constant_value

                if pom.predicate.kind is not TermMapKind.CONSTANT or not predicate.is_iri:
                    raise ModelError(f"{where}: function parameters need a constant predicate")

                if URIRef(predicate.lexical) in _EXECUTES:
                    executed = pom.object.constant_value
                    if pom.object.kind is not TermMapKind.CONSTANT or not executed.is_iri:
                        raise ModelError(f"{where}: fno:executes must name a function IRI")
                    function_iri = executed.lexical
                    continue

                if pom.object.kind is TermMapKind.PARENT_TRIPLES_MAP:
                    raise ModelError(f"{where}: a function parameter cannot be a parent triples map")

                parameters.append((predicate.lexical, pom.object))

        if not function_iri:
            raise ModelError(f"{where}: function value without fno:executes")

        return FunctionCall(function_iri=function_iri, parameters=tuple(parameters))


def parse_mapping_document(text: str, base_iri: str = DEFAULT_BASE_IRI) -> MappingDocument:
    """
    Parse an RML mapping written in Turtle into a MappingDocument.

    Args:
        text (str): Turtle source of the mapping document
        base_iri (str): base used for relative IRIs such as <#TriplesMap1>
    """
    graph = _read_graph(text, base_iri)
    triples_maps = _DocumentReader(graph).read()

    prefixes = {prefix: str(namespace) for prefix, namespace in graph.namespaces() if prefix != "xml"}

    logger.debug("parsed mapping document with {} triples maps", len(triples_maps))

    return MappingDocument(
        triples_maps=tuple(triples_maps),
        prefixes=MappingProxyType(prefixes),
        source_text_hash=hashlib.sha256(text.encode("utf-8")).hexdigest(),
        base_iri=base_iri,
    )


def resolve_roots(doc: MappingDocument, requested: list[str] | None = None) -> list[TriplesMap]:
    """
    Pick the triples maps mapping starts from: the requested ones in the given
    order, or every map that no other map uses as a parent triples map.
    """
    if requested is not None:
        for map_id in requested:
            if doc.get(map_id) is None:
                raise UnknownTriplesMap(map_id)
        return [doc.by_id[map_id] for map_id in requested]

    referenced = {
        term_map.parent_map_id
        for triples_map in doc.triples_maps
        for term_map in triples_map.parent_references
        if term_map.parent_map_id != triples_map.id
    }

    return [triples_map for triples_map in doc.triples_maps if triples_map.id not in referenced]
