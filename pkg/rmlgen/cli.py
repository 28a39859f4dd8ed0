from __future__ import annotations

import argparse
import asyncio
import sys
from pathlib import Path
from typing import TextIO

from loguru import logger

from rmlgen import __version__
from rmlgen.bench import Nesting
from rmlgen.bench import medians
from rmlgen.bench import parse_sizes
from rmlgen.bench import run_benchmark
from rmlgen.conformance import corpus_ok
from rmlgen.conformance import format_json_report
from rmlgen.conformance import format_text_report
from rmlgen.conformance import load_corpus
from rmlgen.conformance import run_corpus
from rmlgen.engine import MappingJob
from rmlgen.engine import OutputFormat
from rmlgen.engine import build_nodes
from rmlgen.errors import BenchmarkError
from rmlgen.errors import RmlgenError
from rmlgen.errors import UnknownTriplesMap
from rmlgen.mapping_parser import parse_mapping_document
from rmlgen.rdf import flatten
from rmlgen.serializers import serialize_jsonld
from rmlgen.serializers import serialize_ntriples
from rmlgen.sources import SourceFormat
from rmlgen.validation import Severity
from rmlgen.validation import is_language_tag
from rmlgen.validation import validate

EXIT_OK = 0
EXIT_MAPPING_ERROR = 1
EXIT_USAGE = 2

_LEVELS = {0: "WARNING", 1: "INFO"}


class _UsageError(Exception):
    pass


def _override(text: str) -> tuple[str, str]:
    declared, separator, actual = text.partition("=")

    if not separator or not declared or not actual:
        raise argparse.ArgumentTypeError(f"expected declared=actual, got {text!r}")

    return declared, actual


def _language(text: str) -> str:
    if not is_language_tag(text):
        raise argparse.ArgumentTypeError(f"invalid language tag {text!r}")
    return text


def _formats(text: str) -> list[SourceFormat]:
    try:
        return [SourceFormat(part.strip().upper()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"formats must be json and/or xml, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmlgen", description="Map JSON and XML sources to RDF with RML.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for debug output")

    commands = parser.add_subparsers(dest="command", required=True)

    map_parser = commands.add_parser("map", help="run a mapping document")
    map_parser.add_argument("-m", "--mapping", required=True, type=Path, help="RML mapping in Turtle")
    map_parser.add_argument(
        "--input",
        dest="inputs",
        action="append",
        default=[],
        type=_override,
        metavar="DECLARED=ACTUAL",
        help="read ACTUAL wherever the mapping declares the source DECLARED",
    )
    map_parser.add_argument("--root", dest="roots", action="append", default=None, help="triples map to start from")
    map_parser.add_argument("--lang", type=_language, help="language tag for every plain literal")
    map_parser.add_argument(
        "--format", choices=[fmt.value for fmt in OutputFormat], default=OutputFormat.NTRIPLES.value
    )
    map_parser.add_argument("-o", "--output", type=Path, help="output file, standard output when omitted")

    validate_parser = commands.add_parser("validate", help="check a mapping document")
    validate_parser.add_argument("-m", "--mapping", required=True, type=Path)

    conformance_parser = commands.add_parser("conformance", help="run the RML test case corpus")
    conformance_parser.add_argument("--corpus", type=Path, default=Path("corpus"))
    conformance_parser.add_argument("--report", choices=["text", "json"], default="text")
    conformance_parser.add_argument("--jobs", type=int, default=4, help="cases run at the same time")
    conformance_parser.add_argument("-o", "--output", type=Path)

    bench_parser = commands.add_parser("bench", help="measure mapping time on generated corpora")
    bench_parser.add_argument("--sizes", default="1k,10k,100k")
    bench_parser.add_argument("--formats", type=_formats, default=[SourceFormat.JSON, SourceFormat.XML])
    bench_parser.add_argument("--nesting", choices=[nesting.value for nesting in Nesting], default="nested")
    bench_parser.add_argument("--repeats", type=int, default=5)
    bench_parser.add_argument("--seed", type=int)
    bench_parser.add_argument("--out", type=Path, default=Path("results.csv"))
    bench_parser.add_argument("--plot", type=Path)

    return parser


def _configure_logging(verbosity: int, stderr: TextIO) -> None:
    logger.remove()
    logger.add(stderr, level=_LEVELS.get(verbosity, "DEBUG"), format="{level}: {message}")


def _write(data: str | bytes, output: Path | None, stdout: TextIO) -> None:
    if output is not None:
        output.write_bytes(data if isinstance(data, bytes) else data.encode("utf-8"))
        return

    stdout.write(data.decode("utf-8") if isinstance(data, bytes) else data)
    stdout.flush()


def _read_mapping(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read mapping {path}: {exc.strerror or exc}") from exc

    return parse_mapping_document(text)


def _run_map(args: argparse.Namespace, stdout: TextIO) -> int:
    document = _read_mapping(args.mapping)
    overrides = dict(args.inputs)

    declared = {triples_map.logical_source.source for triples_map in document.triples_maps}
    for unmatched in sorted(set(overrides) - declared):
        logger.warning("--input {} matches no logical source of the mapping", unmatched)

    job = MappingJob(
        document,
        source_overrides=overrides,
        root_selection=args.roots,
        global_language=args.lang,
        output_format=OutputFormat(args.format),
        base_dir=args.mapping.resolve().parent,
    )

    nodes = build_nodes(job)

    if job.output_format is OutputFormat.JSONLD:
        _write(serialize_jsonld(nodes) + "\n", args.output, stdout)
    else:
        _write(serialize_ntriples(flatten(nodes)), args.output, stdout)

    return EXIT_OK


def _run_validate(args: argparse.Namespace, stdout: TextIO) -> int:
    diagnostics = validate(_read_mapping(args.mapping))

    for diagnostic in diagnostics:
        stdout.write(f"{diagnostic}\n")

    if any(diagnostic.severity is Severity.ERROR for diagnostic in diagnostics):
        return EXIT_MAPPING_ERROR

    return EXIT_OK


def _run_conformance(args: argparse.Namespace, stdout: TextIO) -> int:
    results = asyncio.run(run_corpus(load_corpus(args.corpus), concurrency=args.jobs))
    report = format_json_report(results) + "\n" if args.report == "json" else format_text_report(results)

    _write(report, args.output, stdout)

    return EXIT_OK if corpus_ok(results) else EXIT_MAPPING_ERROR


def _run_bench(args: argparse.Namespace, stdout: TextIO) -> int:
    options = {"seed": args.seed} if args.seed is not None else {}

    samples = run_benchmark(
        parse_sizes(args.sizes),
        args.formats,
        args.repeats,
        nesting=Nesting(args.nesting),
        out=args.out,
        plot=args.plot,
        **options,
    )

    for (fmt, nesting, n), median in sorted(medians(samples).items(), key=lambda item: (item[0][0].value, item[0][2])):
        stdout.write(f"{fmt.value.lower():<5} {nesting.value:<7} {n:>9} {median:>12.3f} ms\n")

    return EXIT_OK


_COMMANDS = {
    "map": _run_map,
    "validate": _run_validate,
    "conformance": _run_conformance,
    "bench": _run_bench,
}


def run_cli(argv: list[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    """
    Run one command and return its exit code: 0 on success, 1 when the
    mapping or a conformance case fails, 2 on usage errors.
    """
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    _configure_logging(args.verbose, stderr)

    try:
        return _COMMANDS[args.command](args, stdout)
    except (_UsageError, BenchmarkError, UnknownTriplesMap) as exc:
        logger.error("{}", exc)
        return EXIT_USAGE
    except RmlgenError as exc:
        logger.error("{}", exc)
        return EXIT_MAPPING_ERROR


def main() -> None:
    sys.exit(run_cli())
