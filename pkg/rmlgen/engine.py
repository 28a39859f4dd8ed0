from __future__ import annotations

import time
from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from pathlib import Path

from loguru import logger

from rmlgen.errors import InvalidIri
from rmlgen.errors import MappingValidationError
from rmlgen.errors import NotAPrefix
from rmlgen.functions import FunctionRegistry
from rmlgen.functions import default_registry
from rmlgen.mapping_parser import resolve_roots
from rmlgen.model import MappingDocument
from rmlgen.model import TermMap
from rmlgen.model import TermMapKind
from rmlgen.model import TermType
from rmlgen.model import TriplesMap
from rmlgen.rdf import RDFTerm
from rmlgen.rdf import TripleSet
from rmlgen.rdf import flatten
from rmlgen.sources import NodeHandle
from rmlgen.sources import PathExpression
from rmlgen.sources import SourceDocument
from rmlgen.sources import compute_relative_iterator
from rmlgen.sources import evaluate_path
from rmlgen.sources import extract_values
from rmlgen.sources import load_source
from rmlgen.templates import expand_template
from rmlgen.validation import Severity
from rmlgen.validation import is_absolute_iri
from rmlgen.validation import is_language_tag
from rmlgen.validation import validate


class OutputFormat(str, Enum):
    NTRIPLES = "ntriples"
    JSONLD = "jsonld"


class Position(str, Enum):
    SUBJECT = "Subject"
    PREDICATE = "Predicate"
    OBJECT = "Object"


@dataclass
class MappingJob:
    """
    Everything one mapping run needs.

    Args:
        document (MappingDocument): parsed mapping
        source_overrides (dict): logical source path as written in the mapping -> file to read instead
        root_selection (list): triples map ids to start from, None for the automatic roots
        global_language (str): language tag given to every literal that would otherwise be plain
        function_registry (FunctionRegistry): implementations of the functions the mapping calls
        output_format (OutputFormat): serialization the caller wants
        base_dir (str|Path): directory relative source paths are resolved against
        base_iri (str): base for relative IRIs, defaults to the document base
    """

    document: MappingDocument
    source_overrides: dict[str, str] = field(default_factory=dict)
    root_selection: list[str] | None = None
    global_language: str | None = None
    function_registry: FunctionRegistry = field(default_factory=default_registry)
    output_format: OutputFormat = OutputFormat.NTRIPLES
    base_dir: str | Path | None = None
    base_iri: str | None = None

    def __post_init__(self):
        if self.global_language is not None and not is_language_tag(self.global_language):
            raise ValueError(f"invalid language tag: {self.global_language!r}")

        if self.base_iri is None:
            self.base_iri = self.document.base_iri


@dataclass(eq=False)
class IntermediateNode:
    """ One mapped subject with its types and properties; nested nodes stand for linked triples maps """

    subject: RDFTerm
    type_iris: list[RDFTerm] = field(default_factory=list)
    properties: dict[RDFTerm, list[RDFTerm | IntermediateNode]] = field(default_factory=dict)

    def add(self, predicate: RDFTerm, value: RDFTerm | IntermediateNode) -> None:
        self.properties.setdefault(predicate, []).append(value)


class _MappingRun:
    """
    Mutable state of a single run: loaded sources, blank node labels and
    relative iterators. Never shared between jobs.
    """

    def __init__(self, job: MappingJob):
        self.job = job
        self.document = job.document
        self._sources: dict[tuple[Path, str], SourceDocument] = {}
        self._blank_labels: dict[str, str] = {}
        self._relative: dict[tuple[str, str, bool], PathExpression | None] = {}

    def source_for(self, triples_map: TriplesMap) -> SourceDocument:
        declared = triples_map.logical_source.source
        path = Path(self.job.source_overrides.get(declared, declared))

        if not path.is_absolute() and self.job.base_dir is not None:
            path = Path(self.job.base_dir) / path

        formulation = triples_map.logical_source.reference_formulation
        key = (path, formulation.value)

        if key not in self._sources:
            logger.debug("loading {} for {}", path, triples_map.id)
            self._sources[key] = load_source(path, formulation.source_format)

        return self._sources[key]

    def blank_label(self, value: str) -> str:
        return self._blank_labels.setdefault(value, f"b{len(self._blank_labels)}")

    def map_root(self, triples_map: TriplesMap) -> list[IntermediateNode]:
        source = self.source_for(triples_map)
        scopes = evaluate_path(source.root, triples_map.logical_source.iterator)

        logger.debug("{}: iterator selected {} nodes", triples_map.id, len(scopes))

        nodes = []
        for scope in scopes:
            nodes.extend(self.map_node(triples_map, scope, ()))

        return nodes

    def map_node(
        self, triples_map: TriplesMap, scope: NodeHandle, ancestry: tuple[str, ...]
    ) -> list[IntermediateNode]:
        subject_map = triples_map.subject_map
        subjects = self.generate_terms(subject_map.term_map, scope, Position.SUBJECT)

        if not subjects:
            return []

        if len(subjects) > 1:
            logger.warning(
                "{}: subject map produced {} subjects for one node, mapping each", triples_map.id, len(subjects)
            )

        types = [RDFTerm.iri(class_iri) for class_iri in subject_map.classes]
        stack = ancestry + (triples_map.id,)

        properties = []
        for pom in triples_map.predicate_object_maps:
            predicates = self.generate_terms(pom.predicate, scope, Position.PREDICATE)

            if not predicates:
                continue

            if pom.object.kind is TermMapKind.PARENT_TRIPLES_MAP:
                values = self.nested(triples_map, pom.object, scope, stack)
            else:
                values = self.generate_terms(pom.object, scope, Position.OBJECT)

            properties.extend((predicate, value) for predicate in predicates for value in values)

        nodes = []
        for subject in subjects:
            node = IntermediateNode(subject=subject, type_iris=list(types))
            for predicate, value in properties:
                node.add(predicate, value)
            nodes.append(node)

        return nodes

    def nested(
        self, triples_map: TriplesMap, term_map: TermMap, scope: NodeHandle, stack: tuple[str, ...]
    ) -> list[IntermediateNode]:
        """ Map the referenced triples map over the nodes below `scope` only """
        referenced = self.document.get(term_map.parent_map_id)

        if referenced is None or referenced.logical_source.key != triples_map.logical_source.key:
            return []

        relative_key = (triples_map.id, referenced.id, referenced.id in stack)
        if relative_key not in self._relative:
            self._relative[relative_key] = self._relative_iterator(triples_map, referenced, term_map, stack)

        relative = self._relative[relative_key]
        if relative is None:
            return []

        child_scopes = evaluate_path(scope, relative)

        if referenced.id in stack:
            # already being expanded further up, link the subject only
            return [
                IntermediateNode(subject=subject)
                for child_scope in child_scopes
                for subject in self.generate_terms(referenced.subject_map.term_map, child_scope, Position.SUBJECT)
            ]

        children = []
        for child_scope in child_scopes:
            children.extend(self.map_node(referenced, child_scope, stack))

        return children

    def _relative_iterator(
        self, triples_map: TriplesMap, referenced: TriplesMap, term_map: TermMap, stack: tuple[str, ...]
    ) -> PathExpression | None:
        try:
            return compute_relative_iterator(triples_map.logical_source.iterator, referenced.logical_source.iterator)
        except NotAPrefix:
            if term_map.join_conditions:
                logger.debug("{} joins {} over iterators that do not nest, link dropped", triples_map.id, referenced.id)
                return None
            if referenced.id in stack:
                logger.debug("{} refers back to {} above its iterator, link dropped", triples_map.id, referenced.id)
                return None
            raise

    def generate_terms(self, term_map: TermMap, scope: NodeHandle, position: Position) -> list[RDFTerm]:
        if term_map.kind is TermMapKind.CONSTANT:
            return [self._with_global_language(term_map.constant_value, position)]

        term_type = _effective_term_type(term_map, position)
        values = self.raw_values(term_map, scope, iri_context=term_type is TermType.IRI)

        return [self.make_term(value, term_map, term_type, position) for value in values]

    def raw_values(self, term_map: TermMap, scope: NodeHandle, iri_context: bool = False) -> list[str]:
        if term_map.kind is TermMapKind.CONSTANT:
            return [term_map.constant_value.lexical]

        if term_map.kind is TermMapKind.REFERENCE:
            return extract_values(scope, term_map.reference)

        if term_map.kind is TermMapKind.TEMPLATE:
            return expand_template(term_map.template, scope, iri_context)

        if term_map.kind is TermMapKind.FUNCTION_VALUE:
            call = term_map.function_call
            parameters = [
                (parameter_iri, self.raw_values(parameter, scope)) for parameter_iri, parameter in call.parameters
            ]
            return self.job.function_registry.call(call.function_iri, parameters)

        raise ValueError(f"{term_map.location}: a parent triples map does not produce values")

    def make_term(self, value: str, term_map: TermMap, term_type: TermType, position: Position) -> RDFTerm:
        if term_type is TermType.BLANK_NODE:
            return RDFTerm.blank(self.blank_label(value))

        if term_type is TermType.LITERAL:
            language = term_map.language

            if language is None and term_map.datatype is None:
                language = self.job.global_language

            return RDFTerm.literal(value, datatype=term_map.datatype, language=language)

        iri = value if is_absolute_iri(value) else f"{self.job.base_iri}{value}"

        if not is_absolute_iri(iri):
            raise InvalidIri(f"{term_map.location}: {value!r} does not form a valid {position.value.lower()} IRI")

        return RDFTerm.iri(iri)

    def _with_global_language(self, term: RDFTerm, position: Position) -> RDFTerm:
        if position is Position.OBJECT and term.is_plain and self.job.global_language:
            return RDFTerm.literal(term.lexical, language=self.job.global_language)
        return term


def _effective_term_type(term_map: TermMap, position: Position) -> TermType:
    if term_map.term_type is not TermType.DEFAULT:
        return term_map.term_type

    if position is not Position.OBJECT:
        return TermType.IRI

    if term_map.kind in (TermMapKind.REFERENCE, TermMapKind.FUNCTION_VALUE):
        return TermType.LITERAL

    if term_map.language is not None or term_map.datatype is not None:
        return TermType.LITERAL

    return TermType.IRI


def _detached_maps(document: MappingDocument, roots: list[TriplesMap]) -> list[TriplesMap]:
    """
    Referenced maps that nesting cannot reach from some referrer: another
    logical source or a declared join. They run on their own after the roots.
    """
    root_ids = {root.id for root in roots}
    detached = set()

    for triples_map in document.triples_maps:
        for term_map in triples_map.parent_references:
            referenced = document.get(term_map.parent_map_id)

            if referenced is None or referenced.id in root_ids:
                continue

            if term_map.join_conditions or referenced.logical_source.key != triples_map.logical_source.key:
                detached.add(referenced.id)

    return [triples_map for triples_map in document.triples_maps if triples_map.id in detached]


def _cycle_roots(document: MappingDocument, roots: list[TriplesMap]) -> list[TriplesMap]:
    """ The first map, in document order, of each reference cycle that no root reaches """
    reached: set[str] = set()

    def reach(map_id: str) -> None:
        pending = [map_id]
        while pending:
            current = pending.pop()
            if current in reached:
                continue
            reached.add(current)
            triples_map = document.get(current)
            if triples_map is not None:
                pending.extend(term_map.parent_map_id for term_map in triples_map.parent_references)

    for root in roots:
        reach(root.id)

    starts = []
    for triples_map in document.triples_maps:
        if triples_map.id not in reached:
            logger.warning("{} is only referenced from within a reference cycle, mapping starts there", triples_map.id)
            starts.append(triples_map)
            reach(triples_map.id)

    return starts


def _check(document: MappingDocument) -> None:
    diagnostics = validate(document)
    errors = [diagnostic for diagnostic in diagnostics if diagnostic.severity is Severity.ERROR]

    if errors:
        raise MappingValidationError(errors)

    for diagnostic in diagnostics:
        logger.warning("{}", diagnostic)


def build_nodes(job: MappingJob) -> list[IntermediateNode]:
    """
    Run the mapping and return the nested result nodes, one list entry per
    subject produced by a root triples map.
    """
    _check(job.document)

    run = _MappingRun(job)
    roots = resolve_roots(job.document, job.root_selection)

    if job.root_selection is None:
        roots = roots + _cycle_roots(job.document, roots)
        roots = roots + _detached_maps(job.document, roots)

    nodes = []
    for root in roots:
        nodes.extend(run.map_root(root))

    return nodes


def run_job(job: MappingJob) -> TripleSet:
    started = time.perf_counter()
    logger.info("mapping {} triples maps", len(job.document.triples_maps))

    triples = flatten(build_nodes(job))

    logger.info("generated {} triples in {:.1f} ms", len(triples), (time.perf_counter() - started) * 1000)
    return triples


def map_node(triples_map: TriplesMap, scope: NodeHandle, job: MappingJob) -> list[IntermediateNode]:
    """ Map one node selected by the iterator of `triples_map` """
    return _MappingRun(job).map_node(triples_map, scope, ())


def generate_terms(term_map: TermMap, scope: NodeHandle, position: Position, job: MappingJob) -> list[RDFTerm]:
    return _MappingRun(job).generate_terms(term_map, scope, position)
