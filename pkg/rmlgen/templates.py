from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from urllib.parse import quote

from rmlgen.errors import TemplateSyntaxError
from rmlgen.sources import NodeHandle
from rmlgen.sources import extract_values


@dataclass(frozen=True)
class Placeholder:
    reference: str


TemplatePart = str | Placeholder


@lru_cache(maxsize=1024)
def parse_template(template: str) -> tuple[TemplatePart, ...]:
    """
    Split a template into literal text and {reference} placeholders.
    A backslash escapes the next character, so \\{ and \\} are literal braces.
    """
    parts: list[TemplatePart] = []
    buffer: list[str] = []
    in_placeholder = False
    chars = iter(template)

    for char in chars:
        if char == "\\":
            escaped = next(chars, None)
            if escaped is None:
                raise TemplateSyntaxError(f"dangling escape at the end of {template!r}")
            buffer.append(escaped)
        elif char == "{":
            if in_placeholder:
                raise TemplateSyntaxError(f"nested '{{' in {template!r}")
            if buffer:
                parts.append("".join(buffer))
            buffer, in_placeholder = [], True
        elif char == "}":
            if not in_placeholder:
                raise TemplateSyntaxError(f"unbalanced '}}' in {template!r}")
            if not buffer:
                raise TemplateSyntaxError(f"empty placeholder in {template!r}")
            parts.append(Placeholder("".join(buffer)))
            buffer, in_placeholder = [], False
        else:
            buffer.append(char)

    if in_placeholder:
        raise TemplateSyntaxError(f"unbalanced '{{' in {template!r}")

    if buffer:
        parts.append("".join(buffer))

    return tuple(parts)


_UNRESERVED = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-._~")

# ucschar ranges of RFC 3987
_UCSCHAR = (
    (0xA0, 0xD7FF),
    (0xF900, 0xFDCF),
    (0xFDF0, 0xFFEF),
    *((plane, plane + 0xFFFD) for plane in range(0x10000, 0xE0000, 0x10000)),
    (0xE1000, 0xEFFFD),
)


def _is_ucschar(char: str) -> bool:
    code = ord(char)
    return any(low <= code <= high for low, high in _UCSCHAR)


def iri_safe(value: str) -> str:
    """ Percent-encode every character outside iunreserved; non-ASCII letters stay as they are """
    return "".join(char if char in _UNRESERVED or _is_ucschar(char) else quote(char, safe="") for char in value)


def expand_template(template: str, scope: NodeHandle, iri_context: bool) -> list[str]:
    """
    Expand every placeholder with the values its reference selects under
    `scope`. Several values expand as a cross product in document order; a
    placeholder without values yields no expansion at all.
    """
    choices: list[list[str]] = []

    for part in parse_template(template):
        if isinstance(part, str):
            choices.append([part])
            continue

        values = extract_values(scope, part.reference)

        if not values:
            return []

        choices.append([iri_safe(value) for value in values] if iri_context else values)

    return ["".join(combination) for combination in itertools.product(*choices)]
