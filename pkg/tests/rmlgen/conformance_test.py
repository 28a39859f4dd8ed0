import asyncio
import json
import shutil

import pytest
import rdflib
from rdflib import Graph

from rmlgen.conformance import EXPECTED_FAILURES
from rmlgen.conformance import NO_JOINS
from rmlgen.conformance import NO_NAMED_GRAPHS
from rmlgen.conformance import CaseResult
from rmlgen.conformance import ConformanceCase
from rmlgen.conformance import Expectation
from rmlgen.conformance import Verdict
from rmlgen.conformance import corpus_ok
from rmlgen.conformance import format_json_report
from rmlgen.conformance import format_text_report
from rmlgen.conformance import load_corpus
from rmlgen.conformance import parse_expected_output
from rmlgen.conformance import run_case
from rmlgen.conformance import run_corpus
from rmlgen.engine import MappingJob
from rmlgen.engine import build_nodes
from rmlgen.engine import run_job
from rmlgen.errors import FixtureError
from rmlgen.isomorphism import isomorphic
from rmlgen.mapping_parser import parse_mapping_document
from rmlgen.rdf import RDFTerm
from rmlgen.rdf import Triple
from rmlgen.rdf import TripleSet
from rmlgen.rdf import term_from_rdflib
from rmlgen.serializers import serialize_jsonld
from rmlgen.serializers import serialize_ntriples

from .serializers_test import jsonld_triples


@pytest.fixture(scope="module")
def corpus_results(corpus_dir):
    cases = load_corpus(corpus_dir)
    return cases, asyncio.run(run_corpus(cases))


def test_corpus_has_both_formats(corpus_results):
    cases, _ = corpus_results

    assert len(cases) == 62
    assert {case.id.rsplit("-", 1)[1] for case in cases} == {"JSON", "XML"}
    assert set(EXPECTED_FAILURES) <= {case.id for case in cases}


def test_corpus_matches_failure_profile(corpus_results):
    _, results = corpus_results

    assert corpus_ok(results), format_text_report([result for result in results if result.unexpected])

    confirmed = {result.case: result.reason for result in results if result.verdict is Verdict.EXPECTED_FAIL_CONFIRMED}
    assert confirmed == EXPECTED_FAILURES


def test_failure_reasons():
    assert EXPECTED_FAILURES["RMLTC0009a-XML"] == NO_JOINS
    assert EXPECTED_FAILURES["RMLTC0007h-JSON"] == NO_NAMED_GRAPHS
    assert "RMLTC0009a-JSON" not in EXPECTED_FAILURES
    assert "RMLTC0008a-JSON" not in EXPECTED_FAILURES
    assert len(EXPECTED_FAILURES) == 14


def test_case_expectation(corpus_dir):
    assert ConformanceCase.from_dir(corpus_dir / "RMLTC0009b-JSON").expectation is Expectation.EXPECTED_FAIL
    assert ConformanceCase.from_dir(corpus_dir / "RMLTC0001a-JSON").expectation is Expectation.PASS


@pytest.mark.asyncio
async def test_run_corpus_keeps_order(corpus_dir):
    cases = load_corpus(corpus_dir)[:6]

    results = await run_corpus(cases, concurrency=2)

    assert [result.case for result in results] == [case.id for case in cases]


def passing_cases(corpus_dir):
    for case in load_corpus(corpus_dir):
        if case.expectation is Expectation.PASS and case.expected_path is not None:
            yield case, MappingJob(parse_mapping_document(case.mapping_path.read_text(encoding="utf-8")), base_dir=case.dir)


def test_passing_cases_round_trip(corpus_dir):
    for case, job in passing_cases(corpus_dir):
        output = serialize_ntriples(run_job(job))
        expected = parse_expected_output(case.expected_path.read_text(encoding="utf-8"))

        graph = Graph()
        graph.parse(data=output.decode("utf-8"), format="nt")
        reread = TripleSet(Triple(*(term_from_rdflib(term) for term in triple)) for triple in graph)

        assert isomorphic(reread, expected.default_graph), case.id
        assert output == serialize_ntriples(run_job(job)), case.id


def test_passing_cases_as_jsonld(corpus_dir):
    for case, job in passing_cases(corpus_dir):
        assert isomorphic(jsonld_triples(serialize_jsonld(build_nodes(job))), run_job(job)), case.id


def test_parse_expected_output():
    text = "\n".join(
        [
            "# comment",
            '<http://example.com/a> <http://example.com/p> "say \\"hi\\"\\u00FC"@en .',
            "_:b0 <http://example.com/p> \"01\"^^<http://www.w3.org/2001/XMLSchema#integer> . # trailing comment",
            "<http://example.com/a> <http://example.com/p> <http://example.com/b> <http://example.com/graph> .",
            "",
        ]
    )

    expected = parse_expected_output(text)

    assert expected.named_graph_triples == 1
    assert len(expected.default_graph) == 2
    assert Triple(
        RDFTerm.iri("http://example.com/a"), RDFTerm.iri("http://example.com/p"), RDFTerm.literal('say "hi"ü', language="en")
    ) in expected.default_graph
    [typed] = [triple for triple in expected.default_graph if triple.subject.is_blank]
    assert typed.object == RDFTerm.literal("01", datatype="http://www.w3.org/2001/XMLSchema#integer")


def test_parse_expected_output_keeps_global_normalization():
    parse_expected_output('<http://example.com/a> <http://example.com/p> "01"^^<http://www.w3.org/2001/XMLSchema#integer> .')

    assert rdflib.NORMALIZE_LITERALS is True


@pytest.mark.parametrize(
    "line",
    [
        "<http://example.com/a> <http://example.com/p> .",
        "<http://example.com/a> <http://example.com/p> <http://example.com/b>",
        "not a statement",
    ],
)
def test_parse_expected_output_errors(line):
    with pytest.raises(FixtureError) as exc_info:
        parse_expected_output(line, "case/output.nq")

    assert "case/output.nq" in str(exc_info.value)


def test_load_corpus_errors(tmp_path):
    with pytest.raises(FixtureError):
        load_corpus(tmp_path / "missing")

    (tmp_path / "RMLTC0001a-JSON").mkdir()
    with pytest.raises(FixtureError):
        load_corpus(tmp_path)


def copy_case(corpus_dir, tmp_path, source, target):
    return ConformanceCase.from_dir(shutil.copytree(corpus_dir / source, tmp_path / target))


def test_unexpected_pass(corpus_dir, tmp_path):
    # a case listed as failing whose mapping needs nothing unsupported
    case = copy_case(corpus_dir, tmp_path, "RMLTC0001a-JSON", "RMLTC0009b-JSON")

    result = run_case(case)

    assert result.verdict is Verdict.UNEXPECTED_PASS
    assert result.unexpected


def test_unexpected_fail(corpus_dir, tmp_path):
    case = copy_case(corpus_dir, tmp_path, "RMLTC0001a-JSON", "RMLTC0001a-JSON")
    (case.dir / "output.nq").write_text(
        '<http://example.com/Venus> <http://xmlns.com/foaf/0.1/name> "Serena" .\n', encoding="utf-8"
    )

    result = run_case(case)

    assert result.verdict is Verdict.UNEXPECTED_FAIL
    assert result.diff_summary == "1 produced, 1 expected, 1 missing, 1 extra"


def test_refused_case_passes(corpus_dir):
    result = run_case(ConformanceCase.from_dir(corpus_dir / "RMLTC0015b-JSON"))

    assert result.verdict is Verdict.PASS
    assert result.diff_summary.startswith("refused")


def test_reports():
    results = [
        CaseResult("RMLTC0001a-JSON", Verdict.PASS),
        CaseResult("RMLTC0009a-XML", Verdict.EXPECTED_FAIL_CONFIRMED, NO_JOINS, "3 produced, 4 expected"),
        CaseResult("RMLTC0013a-XML", Verdict.UNEXPECTED_FAIL, None, "2 produced, 3 expected"),
    ]

    text = format_text_report(results)
    lines = text.splitlines()

    assert lines[1].split() == ["RMLTC0009a-XML", "ExpectedFail-Confirmed", "No", "JOIN", "Support"]
    assert "[2 produced, 3 expected]" in lines[2]
    assert lines[-1] == "Pass: 1, ExpectedFail-Confirmed: 1, UnexpectedFail: 1, UnexpectedPass: 0"
    assert not corpus_ok(results)

    data = json.loads(format_json_report(results))
    assert data[1] == {
        "case": "RMLTC0009a-XML",
        "verdict": "ExpectedFail-Confirmed",
        "reason": "No JOIN Support",
        "diff_summary": "3 produced, 4 expected",
    }
