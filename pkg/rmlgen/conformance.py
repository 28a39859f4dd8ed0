from __future__ import annotations

import asyncio
import json
from dataclasses import asdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from loguru import logger
from rdflib import Dataset
from rdflib.exceptions import ParserError

from rmlgen.engine import MappingJob
from rmlgen.engine import run_job
from rmlgen.errors import FixtureError
from rmlgen.errors import RmlgenError
from rmlgen.isomorphism import isomorphic
from rmlgen.mapping_parser import parse_mapping_document
from rmlgen.rdf import Triple
from rmlgen.rdf import TripleSet
from rmlgen.rdf import lexical_literals
from rmlgen.rdf import term_from_rdflib
from rmlgen.validation import Severity
from rmlgen.validation import validate

NO_NAMED_GRAPHS = "No Named Graph Support"
NO_JOINS = "No JOIN Support"

# the cases the engine is known to fail, with the reason each one fails
EXPECTED_FAILURES: dict[str, str] = {
    "RMLTC0006a-JSON": NO_NAMED_GRAPHS,
    "RMLTC0006a-XML": NO_NAMED_GRAPHS,
    **{f"RMLTC0007{letter}-{fmt}": NO_NAMED_GRAPHS for letter in "efgh" for fmt in ("JSON", "XML")},
    "RMLTC0008a-XML": NO_NAMED_GRAPHS,
    "RMLTC0009a-XML": NO_JOINS,
    "RMLTC0009b-JSON": NO_JOINS,
    "RMLTC0009b-XML": NO_JOINS,
}

_UNSUPPORTED_CONSTRUCT = {
    NO_NAMED_GRAPHS: "unsupported: named graphs",
    NO_JOINS: "unsupported: join",
}

MAPPING_FILE = "mapping.ttl"
EXPECTED_FILES = ("output.nq", "output.nt")


class Expectation(str, Enum):
    PASS = "Pass"
    EXPECTED_FAIL = "ExpectedFail"


class Verdict(str, Enum):
    PASS = "Pass"
    EXPECTED_FAIL_CONFIRMED = "ExpectedFail-Confirmed"
    UNEXPECTED_FAIL = "UnexpectedFail"
    UNEXPECTED_PASS = "UnexpectedPass"


@dataclass(frozen=True)
class ConformanceCase:
    """
    One test case directory: mapping.ttl, its sources and the expected
    output. A case without expected output expects the mapping to be refused.
    """

    id: str
    dir: Path
    expectation: Expectation = Expectation.PASS
    fail_reason: str | None = None

    @classmethod
    def from_dir(cls, path: str | Path) -> ConformanceCase:
        path = Path(path)
        reason = EXPECTED_FAILURES.get(path.name)

        return cls(
            id=path.name,
            dir=path,
            expectation=Expectation.EXPECTED_FAIL if reason else Expectation.PASS,
            fail_reason=reason,
        )

    @property
    def mapping_path(self) -> Path:
        return self.dir / MAPPING_FILE

    @property
    def expected_path(self) -> Path | None:
        for name in EXPECTED_FILES:
            if (self.dir / name).is_file():
                return self.dir / name
        return None


@dataclass
class CaseResult:
    case: str
    verdict: Verdict
    reason: str | None = None
    diff_summary: str = ""

    @property
    def unexpected(self) -> bool:
        return self.verdict in (Verdict.UNEXPECTED_FAIL, Verdict.UNEXPECTED_PASS)

    def to_dict(self) -> dict:
        data = asdict(self)
        data["verdict"] = self.verdict.value
        return data


@dataclass(frozen=True)
class ExpectedOutput:
    default_graph: TripleSet
    named_graph_triples: int = 0


def parse_expected_output(text: str, origin: str = "<expected>") -> ExpectedOutput:
    """
    Read N-Triples or N-Quads. Lexical forms are kept as written; quads in
    a named graph are only counted since the engine cannot produce them.
    """
    dataset = Dataset()

    try:
        with lexical_literals():
            dataset.parse(data=text, format="nquads")
    except ParserError as exc:
        raise FixtureError(f"{origin}: not N-Triples or N-Quads: {exc}") from exc

    default_graph = dataset.default_context
    triples = [Triple(*(term_from_rdflib(term) for term in triple)) for triple in default_graph]
    named = sum(1 for _ in dataset.quads((None, None, None, None))) - len(default_graph)

    return ExpectedOutput(default_graph=TripleSet(triples), named_graph_triples=named)


def load_corpus(corpus_dir: str | Path) -> list[ConformanceCase]:
    """ Every directory below `corpus_dir` holding a mapping.ttl is a case """
    root = Path(corpus_dir)

    if not root.is_dir():
        raise FixtureError(f"corpus directory {root} does not exist")

    cases = [ConformanceCase.from_dir(path) for path in sorted(root.iterdir()) if path.is_dir()]

    for case in cases:
        if not case.mapping_path.is_file():
            raise FixtureError(f"{case.id}: missing {MAPPING_FILE}")

    return cases


def _diff_summary(produced: TripleSet, expected: ExpectedOutput) -> str:
    missing = len(set(expected.default_graph) - set(produced))
    extra = len(set(produced) - set(expected.default_graph))
    summary = f"{len(produced)} produced, {len(expected.default_graph)} expected, {missing} missing, {extra} extra"

    if expected.named_graph_triples:
        summary += f", {expected.named_graph_triples} expected in named graphs"

    return summary


def run_case(case: ConformanceCase) -> CaseResult:
    """ Run one case and judge the outcome against its expectation """
    try:
        text = case.mapping_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureError(f"{case.id}: cannot read {MAPPING_FILE}: {exc}") from exc

    expected_path = case.expected_path
    expected = None
    if expected_path is not None:
        expected = parse_expected_output(expected_path.read_text(encoding="utf-8"), str(expected_path))

    diagnostics = []
    produced = None
    failure = None

    try:
        document = parse_mapping_document(text)
        diagnostics = validate(document)
        produced = run_job(MappingJob(document, base_dir=case.dir))
    except RmlgenError as exc:
        failure = exc
        logger.debug("{}: {}", case.id, exc)

    if expected is None:
        refused = failure is not None or any(d.severity is Severity.ERROR for d in diagnostics)
        matched = refused
        summary = f"refused: {failure}" if refused else f"expected an error, got {len(produced)} triples"
    elif failure is not None:
        matched = False
        summary = f"engine error: {failure}"
    else:
        matched = expected.named_graph_triples == 0 and isomorphic(produced, expected.default_graph)
        summary = "" if matched else _diff_summary(produced, expected)

    if case.expectation is Expectation.PASS:
        verdict = Verdict.PASS if matched else Verdict.UNEXPECTED_FAIL
        return CaseResult(case.id, verdict, None, summary)

    construct = _UNSUPPORTED_CONSTRUCT.get(case.fail_reason)
    reported = any(d.severity is Severity.UNSUPPORTED and d.message == construct for d in diagnostics)

    if not matched or reported:
        return CaseResult(case.id, Verdict.EXPECTED_FAIL_CONFIRMED, case.fail_reason, summary)

    return CaseResult(case.id, Verdict.UNEXPECTED_PASS, case.fail_reason, "output matched and nothing was flagged")


async def run_corpus(cases: list[ConformanceCase], concurrency: int = 4) -> list[CaseResult]:
    """
    Run every case, up to `concurrency` at a time. Results keep the order of
    `cases`.
    """
    semaphore = asyncio.Semaphore(max(1, concurrency))

    async def run(case: ConformanceCase) -> CaseResult:
        async with semaphore:
            return await asyncio.to_thread(run_case, case)

    results = await asyncio.gather(*(run(case) for case in cases))

    unexpected = sum(result.unexpected for result in results)
    logger.info("ran {} conformance cases, {} unexpected", len(results), unexpected)

    return list(results)


def corpus_ok(results: list[CaseResult]) -> bool:
    return not any(result.unexpected for result in results)


def format_text_report(results: list[CaseResult]) -> str:
    lines = []

    for result in results:
        line = f"{result.case:<20} {result.verdict.value:<24}"
        if result.reason:
            line += f" {result.reason}"
        if result.diff_summary and result.unexpected:
            line += f" [{result.diff_summary}]"
        lines.append(line.rstrip())

    totals = {verdict: 0 for verdict in Verdict}
    for result in results:
        totals[result.verdict] += 1

    lines.append(", ".join(f"{verdict.value}: {count}" for verdict, count in totals.items()))

    return "\n".join(lines) + "\n"


def format_json_report(results: list[CaseResult]) -> str:
    return json.dumps([result.to_dict() for result in results], indent=2)
