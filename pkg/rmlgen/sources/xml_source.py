from __future__ import annotations

import re
from dataclasses import dataclass
from dataclasses import field
from functools import lru_cache
from pathlib import Path
from typing import Any

from loguru import logger
from lxml import etree

from rmlgen.errors import FormatMismatch
from rmlgen.errors import SourceLoadError
from rmlgen.errors import SourceParseError
from rmlgen.errors import UnsupportedPathFeature
from rmlgen.sources.base import PathExpression
from rmlgen.sources.base import ReferenceFormulation
from rmlgen.sources.base import SourceDocument
from rmlgen.sources.base import SourceFormat
from rmlgen.sources.base import Step

_NAME = r"[A-Za-z_][\w.\-]*(?::[A-Za-z_][\w.\-]*)?"
_STEP = re.compile(rf"^(?:@{_NAME}|(?:{_NAME}|\*)(?:\[[1-9][0-9]*\])*|text\(\))$")

_SUPPORTED_ENCODINGS = {"UTF-8", "UTF8", "US-ASCII", "ASCII"}


@dataclass
class XmlIndex:
    """ Document order positions of every element, attribute and text node """

    elements: dict[Any, XmlNode] = field(default_factory=dict)
    attributes: dict[tuple[Any, str], int] = field(default_factory=dict)
    texts: dict[tuple[Any, bool], int] = field(default_factory=dict)


@dataclass(eq=False, slots=True)
class XmlNode:
    """
    Handle on an XML element, attribute or text node. For attribute and
    text nodes `element` is the owning element and `text` the node value.
    """

    kind: str
    element: Any
    document_order_index: int
    index: XmlIndex = field(repr=False)
    text: str | None = None

    @property
    def value(self) -> Any:
        return self.element if self.kind == "element" else self.text

    def __repr__(self) -> str:
        return f"XmlNode(#{self.document_order_index}, {self.kind})"


def _index_tree(root: Any) -> XmlIndex:
    index = XmlIndex()
    position = 0
    stack = [(root, False)]

    # iterative pre-order walk; tails are numbered once the element subtree is done
    while stack:
        element, closing = stack.pop()

        if closing:
            if element.tail and element is not root:
                index.texts[(element, True)] = position
                position += 1
            continue

        index.elements[element] = XmlNode("element", element, position, index)
        position += 1

        for name in element.attrib:
            index.attributes[(element, name)] = position
            position += 1

        if element.text:
            index.texts[(element, False)] = position
            position += 1

        stack.append((element, True))
        children = [child for child in element if isinstance(child.tag, str)]
        stack.extend((child, False) for child in reversed(children))

    return index


def _offset_of(raw: bytes, line: int, column: int) -> int:
    lines = raw.split(b"\n")
    return sum(len(chunk) + 1 for chunk in lines[: max(line - 1, 0)]) + max(column - 1, 0)


def load_xml(path: str | Path) -> SourceDocument:
    """ Parse an XML file; only UTF-8 (and its ASCII subset) is accepted """
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise SourceLoadError(f"cannot read {path}: {exc.strerror or exc}") from exc

    if raw.lstrip()[:1] in (b"{", b"["):
        raise FormatMismatch(f"{path} was declared as XML but looks like JSON")

    parser = etree.XMLParser(
        resolve_entities=False, remove_comments=True, remove_pis=True, huge_tree=True
    )

    try:
        root = etree.fromstring(raw, parser)
    except etree.XMLSyntaxError as exc:
        line, column = exc.position
        raise SourceParseError(
            f"invalid XML in {path}: {exc.msg}", offset=_offset_of(raw, line, column)
        ) from exc

    encoding = (root.getroottree().docinfo.encoding or "UTF-8").upper()
    if encoding not in _SUPPORTED_ENCODINGS:
        raise SourceParseError(f"{path} uses unsupported encoding {encoding}")

    index = _index_tree(root)
    logger.debug("loaded XML source {} ({} elements)", path, len(index.elements))

    return SourceDocument(
        format=SourceFormat.XML, root=index.elements[root], origin=str(path), byte_size=len(raw)
    )


def compile_xpath(text: str) -> PathExpression:
    """
    Validate `text` against the supported XPath subset: child steps with name
    tests or `*`, positional predicates, `@name` and `text()`.
    """
    stripped = text.strip()

    if stripped in ("", "."):
        return PathExpression(ReferenceFormulation.XPATH, "", is_relative=True)

    if "//" in stripped:
        raise UnsupportedPathFeature(f"descendant axis is not supported: {text!r}")

    is_relative = not stripped.startswith("/")
    parts = stripped.lstrip("/").split("/")

    if parts and parts[0] == ".":
        parts = parts[1:]

    for part in parts:
        if not _STEP.match(part):
            raise UnsupportedPathFeature(f"unsupported XPath step {part!r} in {text!r}")

    steps = tuple(Step("xpath", part) for part in parts)

    return PathExpression(ReferenceFormulation.XPATH, stripped, is_relative=is_relative, steps=steps)


def render_steps(steps: tuple[Step, ...]) -> str:
    return "/".join(step.value for step in steps)


def _to_handle(result: Any, index: XmlIndex) -> XmlNode | None:
    if isinstance(result, str):
        owner = result.getparent()

        if getattr(result, "is_attribute", False):
            position = index.attributes[(owner, result.attrname)]
            return XmlNode("attribute", owner, position, index, text=str(result))

        position = index.texts[(owner, bool(getattr(result, "is_tail", False)))]
        return XmlNode("text", owner, position, index, text=str(result))

    if isinstance(getattr(result, "tag", None), str):
        return index.elements[result]

    return None


@lru_cache(maxsize=1024)
def _compiled(text: str) -> etree.XPath:
    return etree.XPath(text)


def evaluate_xpath(scope: XmlNode, expr: PathExpression) -> list[XmlNode]:
    if expr.is_self:
        return [scope]

    if scope.kind != "element":
        return []

    text = expr.text if not expr.is_relative else render_steps(expr.steps)

    try:
        results = _compiled(text)(scope.element)
    except etree.XPathError as exc:
        raise UnsupportedPathFeature(f"cannot evaluate XPath {text!r}: {exc}") from exc

    handles = [handle for result in results if (handle := _to_handle(result, scope.index))]
    handles.sort(key=lambda handle: handle.document_order_index)

    return handles


def stringify(node: XmlNode) -> list[str]:
    """ Elements give their concatenated descendant text, attributes their value """
    if node.kind == "element":
        return ["".join(node.element.itertext())]

    return [node.text]
