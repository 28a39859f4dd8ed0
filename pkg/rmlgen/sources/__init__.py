"""
Source access: loading JSON and XML documents and evaluating the JSONPath and
XPath subsets used by iterators and references.
"""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from rmlgen.errors import NotAPrefix
from rmlgen.errors import PathError
from rmlgen.sources import json_source
from rmlgen.sources import xml_source
from rmlgen.sources.base import NodeHandle
from rmlgen.sources.base import PathExpression
from rmlgen.sources.base import ReferenceFormulation
from rmlgen.sources.base import SourceDocument
from rmlgen.sources.base import SourceFormat
from rmlgen.sources.base import Step
from rmlgen.sources.json_source import JsonNode
from rmlgen.sources.xml_source import XmlNode

__all__ = [
    "JsonNode",
    "NodeHandle",
    "PathExpression",
    "ReferenceFormulation",
    "SourceDocument",
    "SourceFormat",
    "Step",
    "XmlNode",
    "compute_relative_iterator",
    "evaluate_path",
    "extract_values",
    "load_source",
    "path_expression",
]


def load_source(path: str | Path, format: SourceFormat) -> SourceDocument:
    """
    Load a source document fully into memory.

    Args:
        path (str|Path): file to read
        format (SourceFormat): declared format, taken from the reference formulation
    """
    if format is SourceFormat.JSON:
        return json_source.load_json(path)

    return xml_source.load_xml(path)


@lru_cache(maxsize=4096)
def path_expression(formulation: ReferenceFormulation, text: str) -> PathExpression:
    """ Compile and validate an expression, raising UnsupportedPathFeature outside the subset """
    if formulation is ReferenceFormulation.JSONPATH:
        return json_source.compile_jsonpath(text)

    return xml_source.compile_xpath(text)


def _formulation_of(scope: NodeHandle) -> ReferenceFormulation:
    if isinstance(scope, JsonNode):
        return ReferenceFormulation.JSONPATH

    return ReferenceFormulation.XPATH


def evaluate_path(scope: NodeHandle, expr: PathExpression) -> list[NodeHandle]:
    """ Select nodes in document order; no match is an empty list """
    if expr.formulation is not _formulation_of(scope):
        raise PathError(f"{expr.formulation.value} expression {expr.text!r} used on the wrong source format")

    if isinstance(scope, JsonNode):
        return json_source.evaluate_jsonpath(scope, expr)

    return xml_source.evaluate_xpath(scope, expr)


def extract_values(scope: NodeHandle, reference: str) -> list[str]:
    """ Evaluate a relative reference and stringify every scalar it selects """
    expr = path_expression(_formulation_of(scope), reference)

    if isinstance(scope, JsonNode):
        return [text for node in json_source.evaluate_jsonpath(scope, expr) for text in json_source.stringify(node)]

    return [text for node in xml_source.evaluate_xpath(scope, expr) for text in xml_source.stringify(node)]


def compute_relative_iterator(parent: PathExpression, child: PathExpression) -> PathExpression:
    """
    Derive the iterator that selects `child` nodes below one `parent` node.

    Both expressions are absolute; the child step list must start with the
    parent step list and the remaining steps form the relative iterator.
    """
    if parent.formulation is not child.formulation or parent.is_relative or child.is_relative:
        raise NotAPrefix(parent.text, child.text)

    prefix = len(parent.steps)

    if child.steps[:prefix] != parent.steps:
        raise NotAPrefix(parent.text, child.text)

    remaining = child.steps[prefix:]

    if child.formulation is ReferenceFormulation.JSONPATH:
        text = json_source.render_steps(remaining)
    else:
        text = xml_source.render_steps(remaining)

    return PathExpression(child.formulation, text, is_relative=True, steps=remaining)
