from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from rmlgen.errors import PathError
from rmlgen.errors import TemplateSyntaxError
from rmlgen.model import MappingDocument
from rmlgen.model import TermMap
from rmlgen.model import TermMapKind
from rmlgen.model import TermType
from rmlgen.model import TriplesMap
from rmlgen.sources import path_expression
from rmlgen.templates import parse_template
from rmlgen.templates import Placeholder

LANGUAGE_TAG = re.compile(r"^[A-Za-z]{1,8}(-[A-Za-z0-9]{1,8})*$")
_ABSOLUTE_IRI = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|^`\\]*$")


def is_language_tag(tag: str) -> bool:
    return bool(LANGUAGE_TAG.match(tag))


def is_absolute_iri(value: str) -> bool:
    return bool(_ABSOLUTE_IRI.match(value))


class Severity(str, Enum):
    ERROR = "error"
    UNSUPPORTED = "unsupported"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    message: str
    location: str

    def __str__(self) -> str:
        prefix = f"{self.severity.value}: "
        text = self.message if self.message.startswith(prefix) else prefix + self.message
        return f"{text} ({self.location})"


class _Checker:
    """ Collects diagnostics for one mapping document """

    def __init__(self, doc: MappingDocument):
        self.doc = doc
        self.diagnostics: list[Diagnostic] = []

    def report(self, severity: Severity, message: str, location: str) -> None:
        self.diagnostics.append(Diagnostic(severity, message, location))

    def run(self) -> list[Diagnostic]:
        for triples_map in self.doc.triples_maps:
            self.check_map(triples_map)
        return self.diagnostics

    def check_map(self, triples_map: TriplesMap) -> None:
        subject_map = triples_map.subject_map
        subject = subject_map.term_map

        if subject.kind is TermMapKind.PARENT_TRIPLES_MAP:
            self.report(Severity.ERROR, "a subject map cannot reference a parent triples map", subject.location)
        elif subject.term_type is TermType.LITERAL or (
            subject.kind is TermMapKind.CONSTANT and subject.constant_value.is_literal
        ):
            self.report(Severity.ERROR, "a subject map cannot produce literals", subject.location)
        else:
            self.check_term_map(triples_map, subject)

        for graph_map in subject_map.graph_maps:
            self.report(Severity.UNSUPPORTED, "unsupported: named graphs", graph_map.location)

        for pom in triples_map.predicate_object_maps:
            self.check_predicate(triples_map, pom.predicate)

            if pom.object.kind is TermMapKind.PARENT_TRIPLES_MAP:
                self.check_parent(triples_map, pom.object)
            else:
                self.check_term_map(triples_map, pom.object)

            for graph_map in pom.graph_maps:
                self.report(Severity.UNSUPPORTED, "unsupported: named graphs", graph_map.location)

    def check_predicate(self, triples_map: TriplesMap, predicate: TermMap) -> None:
        if predicate.kind is TermMapKind.PARENT_TRIPLES_MAP:
            self.report(Severity.ERROR, "a predicate map cannot reference a parent triples map", predicate.location)
            return

        if predicate.term_type not in (TermType.DEFAULT, TermType.IRI):
            self.report(Severity.ERROR, "a predicate map must produce IRIs", predicate.location)

        if predicate.kind is TermMapKind.CONSTANT:
            value = predicate.constant_value
            if not value.is_iri or not is_absolute_iri(value.lexical):
                self.report(Severity.ERROR, f"invalid predicate {value.n3()}", predicate.location)
            return

        self.check_term_map(triples_map, predicate)

    def check_parent(self, triples_map: TriplesMap, term_map: TermMap) -> None:
        parent = self.doc.get(term_map.parent_map_id)

        if parent is None:
            self.report(
                Severity.ERROR, f"parent triples map {term_map.parent_map_id} does not exist", term_map.location
            )
            return

        if term_map.join_conditions:
            self.report(Severity.UNSUPPORTED, "unsupported: join", term_map.location)
        elif parent.logical_source.key != triples_map.logical_source.key:
            self.report(
                Severity.WARNING,
                f"parent triples map {parent.id} reads another source, the link is not generated",
                term_map.location,
            )

    def check_term_map(self, triples_map: TriplesMap, term_map: TermMap) -> None:
        location = term_map.location

        if term_map.datatype and term_map.language:
            self.report(Severity.ERROR, "a term map cannot have both rr:datatype and rr:language", location)

        if term_map.language is not None and not is_language_tag(term_map.language):
            self.report(Severity.ERROR, f"invalid language tag {term_map.language!r}", location)

        if (term_map.datatype or term_map.language) and term_map.term_type not in (
            TermType.DEFAULT,
            TermType.LITERAL,
        ):
            self.report(Severity.ERROR, "rr:datatype and rr:language only apply to literals", location)

        if term_map.kind is TermMapKind.REFERENCE:
            self.check_reference(triples_map, term_map.reference, location)
        elif term_map.kind is TermMapKind.TEMPLATE:
            self.check_template(triples_map, term_map.template, location)
        elif term_map.kind is TermMapKind.FUNCTION_VALUE:
            for _, parameter in term_map.function_call.parameters:
                self.check_term_map(triples_map, parameter)

    def check_reference(self, triples_map: TriplesMap, reference: str, location: str) -> None:
        try:
            expr = path_expression(triples_map.logical_source.reference_formulation, reference)
        except PathError as exc:
            self.report(Severity.ERROR, str(exc), location)
            return

        if not expr.is_relative and not expr.is_self:
            self.report(Severity.ERROR, f"reference {reference!r} must be relative to the iterator", location)

    def check_template(self, triples_map: TriplesMap, template: str, location: str) -> None:
        try:
            parts = parse_template(template)
        except TemplateSyntaxError as exc:
            self.report(Severity.ERROR, str(exc), location)
            return

        for part in parts:
            if isinstance(part, Placeholder):
                self.check_reference(triples_map, part.reference, location)


def validate(doc: MappingDocument) -> list[Diagnostic]:
    """
    Check a parsed mapping before it runs. Errors make run_job refuse the
    mapping; unsupported constructs are reported and then ignored.
    """
    return _Checker(doc).run()
