from __future__ import annotations

import csv
import json
import math
import random
import re
import statistics
import tempfile
import time
import tracemalloc
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

from loguru import logger
from lxml import etree

from rmlgen.engine import MappingJob
from rmlgen.engine import run_job
from rmlgen.errors import BenchmarkError
from rmlgen.errors import RmlgenError
from rmlgen.errors import SourceLoadError
from rmlgen.mapping_parser import parse_mapping_document
from rmlgen.sources import SourceFormat

DEFAULT_SEED = 20190901
CSV_COLUMNS = ("format", "nesting", "object_count", "run_index", "wall_time_ms", "peak_memory_bytes")

_TYPES = ("Hotel", "Apartment", "Camping", "SkiResort", "Hostel", "Guesthouse")
_CITIES = (("Seefeld", "6100"), ("Innsbruck", "6020"), ("Mayrhofen", "6290"), ("Kitzbuehel", "6370"))
_STREETS = ("Gschwandtkopf", "Dorfstrasse", "Bahnhofstrasse", "Kirchweg", "Almweg")
_ADDRESS_KINDS = ("Office", "Lifte", "Reception", "Booking")


class Nesting(str, Enum):
    FLAT = "flat"
    NESTED = "nested"


@dataclass(frozen=True)
class PerfSample:
    object_count: int
    format: SourceFormat
    wall_time: float
    peak_memory: int
    run_index: int
    nesting: Nesting = Nesting.NESTED
    error: str | None = None

    def __post_init__(self):
        if self.object_count <= 0:
            raise BenchmarkError("object_count must be positive")
        if self.wall_time < 0:
            raise BenchmarkError("wall_time cannot be negative")

    @property
    def failed(self) -> bool:
        return self.error is not None

    def csv_row(self) -> dict[str, Any]:
        return {
            "format": self.format.value.lower(),
            "nesting": self.nesting.value,
            "object_count": self.object_count,
            "run_index": self.run_index,
            "wall_time_ms": "" if self.failed else f"{self.wall_time:.3f}",
            "peak_memory_bytes": "" if self.failed else self.peak_memory,
        }


def accommodation_records(n: int, nesting: Nesting, seed: int = DEFAULT_SEED) -> list[dict[str, Any]]:
    """
    Synthetic accommodations shaped like a tourism data feed. Values are all
    strings so the JSON and XML renderings carry the same lexical content.
    """
    if n < 1:
        raise BenchmarkError(f"object count must be at least 1, got {n}")

    rng = random.Random(seed)
    records = []

    for index in range(n):
        city, postcode = rng.choice(_CITIES)
        record: dict[str, Any] = {
            "id": f"a{index}",
            "name": f"{rng.choice(_STREETS)} {rng.choice(_TYPES)} {index}",
            "type": rng.choice(_TYPES),
        }

        if nesting is Nesting.FLAT:
            record.update(street=f"{rng.choice(_STREETS)} {rng.randint(1, 999)}", postcode=postcode, city=city)
        else:
            record["contactDetails"] = [
                {
                    "address": {
                        "id": f"a{index}-{position}",
                        "street": f"{rng.choice(_STREETS)} {rng.randint(1, 999)}",
                        "postcode": postcode,
                        "city": city,
                        "type": rng.choice(_ADDRESS_KINDS),
                    }
                }
                for position in range(rng.randint(1, 3))
            ]

        records.append(record)

    return records


def _to_xml(records: list[dict[str, Any]]) -> bytes:
    root = etree.Element("accommodations")

    for record in records:
        element = etree.SubElement(root, "accommodation")

        for key, value in record.items():
            if key != "contactDetails":
                etree.SubElement(element, key).text = value
                continue

            details = etree.SubElement(element, "contactDetails")
            for detail in value:
                address = etree.SubElement(etree.SubElement(details, "contactDetail"), "address")
                for field_name, field_value in detail["address"].items():
                    etree.SubElement(address, field_name).text = field_value

    return etree.tostring(root, xml_declaration=True, encoding="UTF-8", pretty_print=True)


def generate_corpus(
    n: int,
    format: SourceFormat,
    nesting: Nesting = Nesting.NESTED,
    directory: str | Path | None = None,
    seed: int = DEFAULT_SEED,
) -> Path:
    """
    Write `n` accommodations as a JSON or XML source file.

    Args:
        n (int): number of accommodation objects, at least 1
        format (SourceFormat): JSON or XML
        nesting (Nesting): flat scalar fields or nested contactDetails/address objects
        directory (str|Path): target directory, a fresh temporary one when None
        seed (int): generator seed; equal seeds give byte-identical files
    """
    records = accommodation_records(n, nesting, seed)
    target = Path(directory) if directory is not None else Path(tempfile.mkdtemp(prefix="rmlgen-bench-"))
    path = target / f"accommodations-{nesting.value}-{n}.{format.value.lower()}"

    if format is SourceFormat.JSON:
        payload = json.dumps(records, ensure_ascii=False, indent=1).encode("utf-8")
    else:
        payload = _to_xml(records)

    try:
        target.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise SourceLoadError(f"cannot write corpus {path}: {exc}") from exc

    logger.debug("generated {} ({} bytes)", path, len(payload))
    return path


_PREFIXES = """\
@prefix rr: <http://www.w3.org/ns/r2rml#> .
@prefix rml: <http://semweb.mmlab.be/ns/rml#> .
@prefix ql: <http://semweb.mmlab.be/ns/ql#> .
@prefix schema: <http://schema.org/> .
@base <http://example.com/base/> .
"""

_ITERATORS = {
    SourceFormat.JSON: ("ql:JSONPath", "$.*", "$.*.contactDetails.*.address"),
    SourceFormat.XML: (
        "ql:XPath",
        "/accommodations/accommodation",
        "/accommodations/accommodation/contactDetails/contactDetail/address",
    ),
}


def benchmark_mapping(format: SourceFormat, nesting: Nesting, source: str) -> str:
    """ Mapping document for a generated corpus, addresses as a nested triples map """
    formulation, iterator, address_iterator = _ITERATORS[format]

    accommodation = f"""
<#Accommodation>
    rml:logicalSource [ rml:source "{source}"; rml:referenceFormulation {formulation}; rml:iterator "{iterator}" ];
    rr:subjectMap [ rr:template "http://example.com/accommodation/{{id}}"; rr:class schema:LodgingBusiness ];
    rr:predicateObjectMap [ rr:predicate schema:name; rr:objectMap [ rml:reference "name" ] ];
    rr:predicateObjectMap [ rr:predicate schema:additionalType; rr:objectMap [ rml:reference "type" ] ]"""

    if nesting is Nesting.FLAT:
        return _PREFIXES + accommodation + """;
    rr:predicateObjectMap [ rr:predicate schema:streetAddress; rr:objectMap [ rml:reference "street" ] ];
    rr:predicateObjectMap [ rr:predicate schema:postalCode; rr:objectMap [ rml:reference "postcode" ] ];
    rr:predicateObjectMap [ rr:predicate schema:addressLocality; rr:objectMap [ rml:reference "city" ] ] .
"""

    return _PREFIXES + accommodation + f""";
    rr:predicateObjectMap [ rr:predicate schema:address; rr:objectMap [ rr:parentTriplesMap <#Address> ] ] .

<#Address>
    rml:logicalSource [ rml:source "{source}"; rml:referenceFormulation {formulation}; rml:iterator "{address_iterator}" ];
    rr:subjectMap [ rr:template "http://example.com/address/{{id}}"; rr:class schema:PostalAddress ];
    rr:predicateObjectMap [ rr:predicate schema:streetAddress; rr:objectMap [ rml:reference "street" ] ];
    rr:predicateObjectMap [ rr:predicate schema:postalCode; rr:objectMap [ rml:reference "postcode" ] ];
    rr:predicateObjectMap [ rr:predicate schema:addressLocality; rr:objectMap [ rml:reference "city" ] ];
    rr:predicateObjectMap [ rr:predicate schema:contactType; rr:objectMap [ rml:reference "type" ] ] .
"""


def parse_sizes(text: str) -> list[int]:
    """ "1k,10k,2.5m" -> [1000, 10000, 2500000] """
    sizes = []

    for item in filter(None, (part.strip().lower() for part in text.split(","))):
        match = re.fullmatch(r"(\d+(?:\.\d+)?)([km]?)", item)
        if match is None:
            raise BenchmarkError(f"invalid size {item!r}")
        factor = {"": 1, "k": 1_000, "m": 1_000_000}[match.group(2)]
        sizes.append(int(float(match.group(1)) * factor))

    if not sizes or min(sizes) < 1:
        raise BenchmarkError(f"sizes must be positive integers, got {text!r}")

    return sizes


def _timed_run(job: MappingJob) -> float:
    started = time.perf_counter()
    run_job(job)
    return (time.perf_counter() - started) * 1000


def _peak_memory(job: MappingJob) -> int:
    """ Peak traced memory of one untimed run """
    tracemalloc.start()

    try:
        run_job(job)
        return tracemalloc.get_traced_memory()[1]
    finally:
        tracemalloc.stop()


def _run_cell(
    n: int, format: SourceFormat, nesting: Nesting, repeats: int, directory: Path, seed: int, trace_memory: bool
) -> list[PerfSample]:
    try:
        source = generate_corpus(n, format, nesting, directory, seed)
        document = parse_mapping_document(benchmark_mapping(format, nesting, source.name))
        job = MappingJob(document, base_dir=directory)

        # the warm-up run doubles as the memory run, timed runs are never traced
        if trace_memory:
            peak = _peak_memory(job)
        else:
            run_job(job)
            peak = 0

        samples = []
        for run_index in range(repeats):
            samples.append(PerfSample(n, format, _timed_run(job), peak, run_index, nesting))

        return samples
    except RmlgenError as exc:
        logger.warning("benchmark cell {} {} {} failed: {}", format.value, nesting.value, n, exc)
        return [PerfSample(n, format, 0.0, 0, 0, nesting, error=str(exc))]


def run_benchmark(
    sizes: list[int],
    formats: list[SourceFormat],
    repeats: int,
    nesting: Nesting = Nesting.NESTED,
    out: str | Path | None = None,
    plot: str | Path | None = None,
    seed: int = DEFAULT_SEED,
    trace_memory: bool = True,
) -> list[PerfSample]:
    """
    Time mapping runs over generated corpora of every size and format, one
    cell after the other. Each cell runs once for warm-up, then `repeats`
    measured times.

    Args:
        sizes (list): object counts
        formats (list): source formats to measure
        repeats (int): measured runs per cell, at least 3
        nesting (Nesting): corpus shape
        out (str|Path): CSV file the samples are appended to
        plot (str|Path): SVG file for median time against object count
        seed (int): corpus generator seed
        trace_memory (bool): trace the warm-up run and report its peak memory on every sample
    """
    if repeats < 3:
        raise BenchmarkError(f"repeats must be at least 3, got {repeats}")

    if not sizes or min(sizes) < 1:
        raise BenchmarkError("sizes must be positive")

    samples: list[PerfSample] = []

    with tempfile.TemporaryDirectory(prefix="rmlgen-bench-") as workdir:
        for format in formats:
            for n in sorted(sizes):
                cell = _run_cell(n, format, nesting, repeats, Path(workdir), seed, trace_memory)
                samples.extend(cell)

                if not cell[0].failed:
                    logger.info(
                        "{} {} n={}: median {:.1f} ms",
                        format.value,
                        nesting.value,
                        n,
                        statistics.median(sample.wall_time for sample in cell),
                    )

    if out is not None:
        write_csv(samples, out)

    if plot is not None:
        render_plot(samples, plot)

    return samples


def medians(samples: list[PerfSample]) -> dict[tuple[SourceFormat, Nesting, int], float]:
    """ Median wall time in ms per (format, nesting, object count), failed cells left out """
    cells: dict[tuple[SourceFormat, Nesting, int], list[float]] = {}

    for sample in samples:
        if not sample.failed:
            cells.setdefault((sample.format, sample.nesting, sample.object_count), []).append(sample.wall_time)

    return {key: statistics.median(times) for key, times in cells.items()}


def write_csv(samples: list[PerfSample], path: str | Path) -> Path:
    """ Append samples; the header is written only when the file is new """
    path = Path(path)
    is_new = not path.exists() or path.stat().st_size == 0

    with path.open("a", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=CSV_COLUMNS)
        if is_new:
            writer.writeheader()
        writer.writerows(sample.csv_row() for sample in samples)

    return path


def render_plot(samples: list[PerfSample], path: str | Path) -> bool:
    """ Median time against object count per format, as SVG. False when matplotlib is missing """
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        logger.warning("matplotlib is not installed, skipping plot {}", path)
        return False

    series: dict[str, list[tuple[int, float]]] = {}
    for (format, nesting, n), median in sorted(medians(samples).items(), key=lambda item: item[0][2]):
        series.setdefault(f"{format.value} ({nesting.value})", []).append((n, median))

    figure, axes = plt.subplots(figsize=(6, 4))

    for label, points in series.items():
        axes.plot([n for n, _ in points], [median for _, median in points], marker="o", label=label)

    axes.set_xlabel("objects")
    axes.set_ylabel("median mapping time (ms)")
    axes.grid(True, linestyle=":")
    if series:
        axes.legend()

    figure.tight_layout()
    figure.savefig(path, format="svg")
    plt.close(figure)

    return True


def doubling_ratios(samples: list[PerfSample], format: SourceFormat, nesting: Nesting) -> list[float]:
    """ Median time ratios between consecutive sizes that double """
    cell_medians = {n: median for (fmt, nest, n), median in medians(samples).items() if fmt is format and nest is nesting}
    sizes = sorted(cell_medians)

    return [
        cell_medians[larger] / cell_medians[smaller] if cell_medians[smaller] else math.inf
        for smaller, larger in zip(sizes, sizes[1:])
        if larger == 2 * smaller
    ]
