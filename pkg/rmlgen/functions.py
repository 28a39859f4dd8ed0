from __future__ import annotations

from typing import Callable

from loguru import logger

from rmlgen.errors import FunctionNotRegistered
from rmlgen.namespaces import GREL

Parameters = list[tuple[str, list[str]]]
MappingFunction = Callable[[Parameters], list[str]]


class FunctionRegistry:
    """
    Maps function IRIs to Python callables. A callable receives the evaluated
    parameters in mapping order, each as (parameter IRI, values), and returns
    the produced values; an empty list produces no term.
    """

    def __init__(self, functions: dict[str, MappingFunction] | None = None) -> None:
        self._functions: dict[str, MappingFunction] = dict(functions or {})

    def register(self, function_iri: str, function: MappingFunction) -> None:
        if function_iri in self._functions:
            logger.debug("replacing implementation of <{}>", function_iri)

        self._functions[str(function_iri)] = function

    def function(self, function_iri: str) -> Callable[[MappingFunction], MappingFunction]:
        """ Decorator form of register """

        def decorator(function: MappingFunction) -> MappingFunction:
            self.register(function_iri, function)
            return function

        return decorator

    def lookup(self, function_iri: str) -> MappingFunction:
        try:
            return self._functions[function_iri]
        except KeyError:
            raise FunctionNotRegistered(function_iri) from None

    def call(self, function_iri: str, parameters: Parameters) -> list[str]:
        return [str(value) for value in self.lookup(function_iri)(parameters)]

    def copy(self) -> FunctionRegistry:
        return FunctionRegistry(self._functions)

    def __contains__(self, function_iri: object) -> bool:
        return function_iri in self._functions

    def __len__(self) -> int:
        return len(self._functions)


def values_of(parameters: Parameters, parameter_iri: str) -> list[str]:
    """ All values passed for one parameter, [] when it was not given """
    return [value for iri, values in parameters if iri == parameter_iri for value in values]


def _per_value(transform: Callable[[str], str]) -> MappingFunction:
    def apply(parameters: Parameters) -> list[str]:
        return [transform(value) for value in values_of(parameters, str(GREL.valueParameter))]

    return apply


def _string_replace(parameters: Parameters) -> list[str]:
    find = values_of(parameters, str(GREL.p_string_find))
    replace = values_of(parameters, str(GREL.p_string_replace))

    if not find:
        return values_of(parameters, str(GREL.valueParameter))

    return [
        value.replace(find[0], replace[0] if replace else "")
        for value in values_of(parameters, str(GREL.valueParameter))
    ]


def _array_join(parameters: Parameters) -> list[str]:
    items = values_of(parameters, str(GREL.p_array_a))
    separator = values_of(parameters, str(GREL.p_string_sep))

    return ["".join(items) if not separator else separator[0].join(items)] if items else []


def default_registry() -> FunctionRegistry:
    """ A registry preloaded with the common GREL string functions """
    return FunctionRegistry(
        {
            str(GREL.toUpperCase): _per_value(str.upper),
            str(GREL.toLowerCase): _per_value(str.lower),
            str(GREL.toTitlecase): _per_value(str.title),
            str(GREL.string_trim): _per_value(str.strip),
            str(GREL.string_replace): _string_replace,
            str(GREL.array_join): _array_join,
        }
    )
