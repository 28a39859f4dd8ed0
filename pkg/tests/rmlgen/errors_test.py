import pytest

from rmlgen.errors import FunctionNotRegistered
from rmlgen.errors import MappingSyntaxError
from rmlgen.errors import MappingValidationError
from rmlgen.errors import NotAPrefix
from rmlgen.errors import PathError
from rmlgen.errors import RmlgenError
from rmlgen.errors import SourceError
from rmlgen.errors import SourceParseError
from rmlgen.errors import UnknownTriplesMap
from rmlgen.errors import UnsupportedPathFeature
from rmlgen.validation import Diagnostic
from rmlgen.validation import Severity


def test_syntax_error_location():
    assert str(MappingSyntaxError("malformed Turtle")) == "malformed Turtle"
    assert str(MappingSyntaxError("bad", line=3)) == "bad (line 3)"

    error = MappingSyntaxError("bad", line=3, column=7)

    assert str(error) == "bad (line 3, column 7)"
    assert (error.line, error.column) == (3, 7)


def test_source_parse_error_offset():
    assert str(SourceParseError("invalid JSON", offset=12)) == "invalid JSON (byte offset 12)"
    assert SourceParseError("invalid JSON").offset is None


def test_not_a_prefix_names_both_expressions():
    error = NotAPrefix("$.a", "$.b.c")

    assert "'$.a'" in str(error)
    assert "'$.b.c'" in str(error)
    assert isinstance(error, PathError)


def test_validation_error_keeps_diagnostics():
    diagnostics = [Diagnostic(Severity.ERROR, "invalid language tag 'en_US'", "map")]
    error = MappingValidationError(diagnostics)

    assert error.diagnostics == diagnostics
    assert "invalid language tag" in str(error)


@pytest.mark.parametrize(
    "error",
    [
        UnknownTriplesMap("http://example.com/Missing"),
        FunctionNotRegistered("http://example.com/f"),
        UnsupportedPathFeature("recursive descent"),
        SourceParseError("x"),
    ],
)
def test_every_error_is_an_rmlgen_error(error):
    assert isinstance(error, RmlgenError)


def test_source_errors_share_a_base():
    assert issubclass(SourceParseError, SourceError)
    assert not issubclass(SourceError, PathError)
