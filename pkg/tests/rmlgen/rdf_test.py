import pytest
from rdflib import BNode
from rdflib import Graph
from rdflib import Literal
from rdflib import URIRef

from rmlgen.engine import IntermediateNode
from rmlgen.isomorphism import isomorphic
from rmlgen.namespaces import RDF_TYPE
from rmlgen.namespaces import XSD
from rmlgen.rdf import RDFTerm
from rmlgen.rdf import TermKind
from rmlgen.rdf import Triple
from rmlgen.rdf import TripleSet
from rmlgen.rdf import flatten
from rmlgen.rdf import lexical_literals
from rmlgen.rdf import term_from_rdflib
from rmlgen.serializers import serialize_ntriples

EX = "http://example.com/"


def iri(name):
    return RDFTerm.iri(f"{EX}{name}")


def reparse(triples):
    graph = Graph()
    graph.parse(data=serialize_ntriples(triples).decode("utf-8"), format="nt")
    return TripleSet(Triple(*(term_from_rdflib(term) for term in triple)) for triple in graph)


def test_literal_drops_xsd_string():
    assert RDFTerm.literal("x", datatype=str(XSD.string)) == RDFTerm.literal("x")
    assert RDFTerm.literal("x").is_plain
    assert not RDFTerm.literal("x", language="en").is_plain


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": TermKind.IRI, "lexical": "http://example.com/", "language": "en"},
        {"kind": TermKind.LITERAL, "lexical": "x", "datatype": str(XSD.integer), "language": "en"},
        {"kind": TermKind.BLANK_NODE, "lexical": "b0", "datatype": str(XSD.integer)},
    ],
)
def test_invalid_terms(kwargs):
    with pytest.raises(ValueError):
        RDFTerm(**kwargs)


def test_n3_forms():
    assert iri("a").n3() == "<http://example.com/a>"
    assert RDFTerm.blank("b0").n3() == "_:b0"
    assert RDFTerm.literal("Tennis", language="en").n3() == '"Tennis"@en'
    assert RDFTerm.literal("1873", datatype=str(XSD.gYear)).n3() == (
        '"1873"^^<http://www.w3.org/2001/XMLSchema#gYear>'
    )
    assert RDFTerm.literal('say "hi"\\\n').n3() == '"say \\"hi\\"\\\\\\n"'


def test_triple_set_keeps_first_occurrence_order():
    first = Triple(iri("a"), iri("p"), RDFTerm.literal("1"))
    second = Triple(iri("b"), iri("p"), RDFTerm.literal("2"))

    triples = TripleSet([second, first, second])

    assert triples.triples == (second, first)
    assert len(triples) == 2
    assert first in triples
    assert triples == TripleSet([first, second])
    assert hash(triples) == hash(TripleSet([first, second]))


def test_triple_set_rejects_literal_subjects():
    with pytest.raises(ValueError):
        TripleSet([Triple(RDFTerm.literal("x"), iri("p"), iri("o"))])


def test_flatten_order():
    address = IntermediateNode(subject=iri("address/1"))
    address.add(iri("street"), RDFTerm.literal("Gschwandtkopf 700"))

    resort = IntermediateNode(subject=iri("resort/1"), type_iris=[iri("SkiResort")])
    resort.add(iri("name"), RDFTerm.literal("Gschwandtkopflifte"))
    resort.add(iri("address"), address)

    assert flatten([resort]).triples == (
        Triple(iri("resort/1"), RDFTerm.iri(RDF_TYPE), iri("SkiResort")),
        Triple(iri("resort/1"), iri("name"), RDFTerm.literal("Gschwandtkopflifte")),
        Triple(iri("resort/1"), iri("address"), iri("address/1")),
        Triple(iri("address/1"), iri("street"), RDFTerm.literal("Gschwandtkopf 700")),
    )


def test_flatten_deduplicates_shared_children():
    address = IntermediateNode(subject=iri("address/1"))
    address.add(iri("street"), RDFTerm.literal("Street"))

    first = IntermediateNode(subject=iri("resort/1"))
    first.add(iri("address"), address)
    second = IntermediateNode(subject=iri("resort/2"))
    second.add(iri("address"), address)

    assert len(flatten([first, second])) == 3


def test_ntriples_reparse():
    triples = TripleSet(
        [
            Triple(iri("a"), iri("p"), RDFTerm.literal('quote " and backslash \\')),
            Triple(iri("a"), iri("p"), RDFTerm.literal("line\nbreak\ttab\r")),
            Triple(iri("a"), iri("p"), RDFTerm.literal("control \x01 char")),
            Triple(iri("a"), iri("p"), RDFTerm.literal("Zürich", language="de")),
            Triple(iri("a"), iri("p"), RDFTerm.literal("1873", datatype=str(XSD.gYear))),
            Triple(RDFTerm.blank("b0"), iri("p"), iri("Bolivia%2C%20Plurinational")),
        ]
    )

    assert isomorphic(reparse(triples), triples)


def test_ntriples_layout():
    triples = TripleSet([Triple(iri("a"), iri("p"), iri("b")), Triple(iri("b"), iri("p"), iri("a"))])

    assert serialize_ntriples(triples) == (
        b"<http://example.com/a> <http://example.com/p> <http://example.com/b> .\n"
        b"<http://example.com/b> <http://example.com/p> <http://example.com/a> .\n"
    )
    assert serialize_ntriples(TripleSet()) == b""


def test_term_from_rdflib():
    assert term_from_rdflib(URIRef(f"{EX}a")) == iri("a")
    assert term_from_rdflib(BNode("n1")) == RDFTerm.blank("n1")
    assert term_from_rdflib(Literal("hallo", lang="de")) == RDFTerm.literal("hallo", language="de")
    assert term_from_rdflib(Literal("01", datatype=XSD.integer, normalize=False)) == RDFTerm.literal("01", datatype=str(XSD.integer))


def test_lexical_literals_restores_normalization():
    with lexical_literals():
        kept = Literal("01", datatype=XSD.integer)

    assert str(kept) == "01"
    assert str(Literal("01", datatype=XSD.integer)) == "1"
