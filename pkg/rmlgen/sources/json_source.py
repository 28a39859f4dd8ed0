from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any
from typing import Iterator

import jsonpath_ng
from jsonpath_ng.jsonpath import Child
from jsonpath_ng.jsonpath import Descendants
from jsonpath_ng.jsonpath import Fields
from jsonpath_ng.jsonpath import Index
from jsonpath_ng.jsonpath import Root
from jsonpath_ng.jsonpath import Slice
from jsonpath_ng.jsonpath import This
from loguru import logger

from rmlgen.errors import FormatMismatch
from rmlgen.errors import SourceLoadError
from rmlgen.errors import SourceParseError
from rmlgen.errors import UnsupportedPathFeature
from rmlgen.sources.base import PathExpression
from rmlgen.sources.base import ReferenceFormulation
from rmlgen.sources.base import SourceDocument
from rmlgen.sources.base import SourceFormat
from rmlgen.sources.base import Step

ROOT = Step("root", "$")
WILDCARD = Step("wildcard", "*")

_PLAIN_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_\-]*$")


class JsonNumber(str):
    """ A JSON number kept in the lexical form it had in the source document """


@dataclass(eq=False, slots=True)
class JsonNode:
    """
    Handle on one JSON value. `children` is a dict for objects (insertion
    order of the document), a list for arrays and None for scalars.
    """

    value: Any
    document_order_index: int
    children: dict[str, JsonNode] | list[JsonNode] | None

    def __repr__(self) -> str:
        return f"JsonNode(#{self.document_order_index}, {type(self.value).__name__})"


def _build(value: Any, counter: Iterator[int]) -> JsonNode:
    node = JsonNode(value=value, document_order_index=next(counter), children=None)

    if isinstance(value, dict):
        node.children = {key: _build(member, counter) for key, member in value.items()}
    elif isinstance(value, list):
        node.children = [_build(item, counter) for item in value]

    return node


def load_json(path: str | Path) -> SourceDocument:
    """ Parse a UTF-8 JSON file into a tree of JsonNode handles """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise SourceLoadError(f"cannot read {path}: {exc.strerror or exc}") from exc

    try:
        text = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise SourceParseError(f"{path} is not valid UTF-8", offset=exc.start) from exc

    if text.lstrip().startswith("<"):
        raise FormatMismatch(f"{path} was declared as JSON but looks like XML")

    try:
        value = json.loads(
            text, parse_int=JsonNumber, parse_float=JsonNumber, parse_constant=JsonNumber
        )
    except json.JSONDecodeError as exc:
        offset = len(text[: exc.pos].encode("utf-8"))
        raise SourceParseError(f"invalid JSON in {path}: {exc.msg}", offset=offset) from exc

    root = _build(value, itertools.count())
    logger.debug("loaded JSON source {} ({} bytes)", path, len(raw))

    return SourceDocument(format=SourceFormat.JSON, root=root, origin=str(path), byte_size=len(raw))


def _flatten(node: Any) -> list[Step]:
    if isinstance(node, Child):
        return _flatten(node.left) + _flatten(node.right)

    if isinstance(node, Descendants):
        raise UnsupportedPathFeature("JSONPath recursive descent is not supported")

    if isinstance(node, Root):
        return [ROOT]

    if isinstance(node, This):
        return []

    if isinstance(node, Fields):
        if len(node.fields) != 1:
            raise UnsupportedPathFeature("JSONPath unions are not supported")
        name = node.fields[0]
        return [WILDCARD] if name == "*" else [Step("field", name)]

    if isinstance(node, Index):
        indices = getattr(node, "indices", None) or [node.index]
        if len(indices) != 1 or indices[0] < 0:
            raise UnsupportedPathFeature("only a single non-negative array index is supported")
        return [Step("index", str(indices[0]))]

    if isinstance(node, Slice):
        if node.start is None and node.end is None and node.step is None:
            return [WILDCARD]
        raise UnsupportedPathFeature("JSONPath slices are not supported")

    raise UnsupportedPathFeature(f"JSONPath construct {type(node).__name__} is not supported")


def compile_jsonpath(text: str) -> PathExpression:
    """
    Validate `text` against the supported JSONPath subset: root, dot and
    bracket children, `*` and non-negative indexes.
    """
    stripped = text.strip()

    if stripped in ("", "@"):
        return PathExpression(ReferenceFormulation.JSONPATH, "", is_relative=True)

    try:
        parsed = jsonpath_ng.parse(stripped)
    except Exception as exc:
        raise UnsupportedPathFeature(f"cannot parse JSONPath {text!r}: {exc}") from exc

    steps = _flatten(parsed)

    if ROOT in steps[1:]:
        raise UnsupportedPathFeature(f"'$' may only start a JSONPath: {text!r}")

    is_relative = not steps or steps[0] != ROOT

    return PathExpression(
        ReferenceFormulation.JSONPATH, stripped, is_relative=is_relative, steps=tuple(steps)
    )


def render_steps(steps: tuple[Step, ...]) -> str:
    """ Write relative steps back as JSONPath text """
    text = ""

    for step in steps:
        if step.kind == "index":
            text += f"[{step.value}]"
            continue

        if step.kind == "wildcard":
            part = "*"
        elif _PLAIN_NAME.match(step.value):
            part = step.value
        else:
            escaped = step.value.replace("\\", "\\\\").replace("'", "\\'")
            text += f"['{escaped}']"
            continue

        text += f".{part}" if text else part

    return text


def _select(nodes: list[JsonNode], step: Step) -> list[JsonNode]:
    selected = []

    for node in nodes:
        children = node.children

        if step.kind == "field":
            if isinstance(children, dict) and step.value in children:
                selected.append(children[step.value])
        elif step.kind == "wildcard":
            if isinstance(children, dict):
                selected.extend(children.values())
            elif isinstance(children, list):
                selected.extend(children)
        elif step.kind == "index":
            position = int(step.value)
            if isinstance(children, list) and position < len(children):
                selected.append(children[position])

    return selected


def evaluate_jsonpath(scope: JsonNode, expr: PathExpression) -> list[JsonNode]:
    nodes = [scope]

    for step in expr.steps:
        if step == ROOT:
            continue
        nodes = _select(nodes, step)
        if not nodes:
            break

    return nodes


def stringify(node: JsonNode) -> list[str]:
    """ Scalars become one string; arrays of scalars one string per element """
    value = node.value

    if isinstance(value, list):
        values = []
        for child in node.children:
            if child.children is None:
                values.extend(stringify(child))
        return values

    return [] if (text := scalar_text(value)) is None else [text]


def scalar_text(value: Any) -> str | None:
    if value is None or isinstance(value, (dict, list)):
        return None

    if isinstance(value, bool):
        return "true" if value else "false"

    if isinstance(value, (JsonNumber, str)):
        return str(value)

    # shortest round-trip form for numbers without a lexical form
    return repr(value)
