import pytest

from rmlgen.errors import FunctionNotRegistered
from rmlgen.functions import FunctionRegistry
from rmlgen.functions import default_registry
from rmlgen.functions import values_of
from rmlgen.namespaces import GREL

VALUE = str(GREL.valueParameter)


@pytest.fixture
def registry():
    return default_registry()


def test_lookup_unknown_function(registry):
    with pytest.raises(FunctionNotRegistered) as exc_info:
        registry.call("http://example.com/missing", [])

    assert exc_info.value.function_iri == "http://example.com/missing"


@pytest.mark.parametrize(
    "function, value, expected",
    [
        (GREL.toUpperCase, "Tennis", "TENNIS"),
        (GREL.toLowerCase, "Tennis", "tennis"),
        (GREL.toTitlecase, "venus williams", "Venus Williams"),
        (GREL.string_trim, "  Venus ", "Venus"),
    ],
)
def test_string_functions(registry, function, value, expected):
    assert registry.call(str(function), [(VALUE, [value])]) == [expected]


def test_functions_map_every_value(registry):
    assert registry.call(str(GREL.toUpperCase), [(VALUE, ["a", "b"])]) == ["A", "B"]
    assert registry.call(str(GREL.toUpperCase), []) == []


def test_string_replace(registry):
    parameters = [
        (VALUE, ["Formula 1"]),
        (str(GREL.p_string_find), [" "]),
        (str(GREL.p_string_replace), ["_"]),
    ]

    assert registry.call(str(GREL.string_replace), parameters) == ["Formula_1"]


def test_array_join(registry):
    parameters = [(str(GREL.p_array_a), ["Tennis", "Chess"]), (str(GREL.p_string_sep), [", "])]

    assert registry.call(str(GREL.array_join), parameters) == ["Tennis, Chess"]
    assert registry.call(str(GREL.array_join), [(str(GREL.p_string_sep), [","])]) == []


def test_register_with_decorator():
    registry = FunctionRegistry()

    @registry.function("http://example.com/length")
    def length(parameters):
        return [len(value) for value in values_of(parameters, "http://example.com/text")]

    assert "http://example.com/length" in registry
    assert registry.call("http://example.com/length", [("http://example.com/text", ["abc"])]) == ["3"]


def test_copy_is_independent(registry):
    copy = registry.copy()
    copy.register("http://example.com/f", lambda parameters: [])

    assert len(copy) == len(registry) + 1
    assert "http://example.com/f" not in registry


def test_values_of_collects_repeated_parameters():
    parameters = [("p", ["1"]), ("q", ["x"]), ("p", ["2", "3"])]

    assert values_of(parameters, "p") == ["1", "2", "3"]
    assert values_of(parameters, "r") == []
