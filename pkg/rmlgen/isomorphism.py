from __future__ import annotations

import networkx as nx
from networkx.algorithms.isomorphism import DiGraphMatcher

from rmlgen.rdf import RDFTerm
from rmlgen.rdf import Triple
from rmlgen.rdf import TripleSet


def _has_blank(triple: Triple) -> bool:
    return triple.subject.is_blank or triple.object.is_blank


def _blank_graph(triples: list[Triple]) -> nx.DiGraph:
    """ Terms become nodes; ground terms keep their identity as a node label """
    graph = nx.DiGraph()

    for subject, predicate, obj in triples:
        for term in (subject, obj):
            graph.add_node(term, ground=None if term.is_blank else term)

        if graph.has_edge(subject, obj):
            graph[subject][obj]["predicates"] = graph[subject][obj]["predicates"] | {predicate}
        else:
            graph.add_edge(subject, obj, predicates=frozenset({predicate}))

    return graph


def _signature(triples: list[Triple]) -> list[tuple[RDFTerm | None, RDFTerm, RDFTerm | None]]:
    """ Blank-insensitive fingerprint used to reject obvious mismatches early """
    return sorted(
        (
            (None if s.is_blank else s, p, None if o.is_blank else o)
            for s, p, o in triples
        ),
        key=repr,
    )


def isomorphic(a: TripleSet, b: TripleSet) -> bool:
    """
    True iff the two graphs are equal up to a renaming of blank nodes. Ground
    triples must match exactly; the blank part goes through VF2 matching.
    """
    if len(a) != len(b):
        return False

    ground_a = {triple for triple in a if not _has_blank(triple)}
    ground_b = {triple for triple in b if not _has_blank(triple)}

    if ground_a != ground_b:
        return False

    blank_a = [triple for triple in a if _has_blank(triple)]
    blank_b = [triple for triple in b if _has_blank(triple)]

    if not blank_a:
        return True

    if _signature(blank_a) != _signature(blank_b):
        return False

    matcher = DiGraphMatcher(
        _blank_graph(blank_a),
        _blank_graph(blank_b),
        node_match=lambda x, y: x["ground"] == y["ground"],
        edge_match=lambda x, y: x["predicates"] == y["predicates"],
    )

    return matcher.is_isomorphic()
