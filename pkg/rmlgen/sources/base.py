from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any
from typing import NamedTuple
from typing import Protocol


class ReferenceFormulation(str, Enum):
    JSONPATH = "JSONPath"
    XPATH = "XPath"

    @property
    def source_format(self) -> SourceFormat:
        return SourceFormat.JSON if self is ReferenceFormulation.JSONPATH else SourceFormat.XML


class SourceFormat(str, Enum):
    JSON = "JSON"
    XML = "XML"

    @property
    def formulation(self) -> ReferenceFormulation:
        return ReferenceFormulation.JSONPATH if self is SourceFormat.JSON else ReferenceFormulation.XPATH


class Step(NamedTuple):
    """ One location step: kind is root, field, wildcard, index (JSON) or xpath (XML) """

    kind: str
    value: str


@dataclass(frozen=True)
class PathExpression:
    """
    A validated iterator or reference expression.

    `steps` holds the normalized location steps used for prefix matching. A
    relative expression without steps selects the scope node itself.
    """

    formulation: ReferenceFormulation
    text: str
    is_relative: bool
    steps: tuple[Step, ...] = ()

    @property
    def is_self(self) -> bool:
        return self.is_relative and not self.steps

    def __str__(self) -> str:
        return self.text


class NodeHandle(Protocol):
    """ Format neutral reference to one node of a parsed source tree """

    document_order_index: int

    @property
    def value(self) -> Any:
        ...


@dataclass(frozen=True)
class SourceDocument:
    format: SourceFormat
    root: NodeHandle
    origin: str
    byte_size: int
