class RmlgenError(Exception):
    """ Base class for every error raised by rmlgen """


class MappingSyntaxError(RmlgenError):
    """ The mapping document is not valid Turtle """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column

        location = ""
        if line is not None:
            location = f" (line {line}" + (f", column {column})" if column is not None else ")")

        super().__init__(f"{message}{location}")


class ModelError(RmlgenError):
    """ An RML property has an object the model cannot interpret """


class MappingValidationError(RmlgenError):
    def __init__(self, diagnostics: list):
        self.diagnostics = diagnostics
        messages = "; ".join(d.message for d in diagnostics)
        super().__init__(f"mapping document is invalid: {messages}")


class UnknownTriplesMap(RmlgenError):
    def __init__(self, map_id: str):
        self.map_id = map_id
        super().__init__(f"unknown triples map: {map_id}")


class SourceError(RmlgenError):
    pass


class SourceLoadError(SourceError):
    pass


class SourceParseError(SourceError):
    def __init__(self, message: str, offset: int | None = None):
        self.offset = offset
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")


class FormatMismatch(SourceError):
    pass


class PathError(RmlgenError):
    pass


class UnsupportedPathFeature(PathError):
    pass


class NotAPrefix(PathError):
    def __init__(self, parent: str, child: str):
        self.parent = parent
        self.child = child
        super().__init__(f"iterator {child!r} does not extend iterator {parent!r}")


class TemplateSyntaxError(RmlgenError):
    pass


class FunctionNotRegistered(RmlgenError):
    def __init__(self, function_iri: str):
        self.function_iri = function_iri
        super().__init__(f"no implementation registered for function <{function_iri}>")


class InvalidIri(RmlgenError):
    pass


class FixtureError(RmlgenError):
    pass


class BenchmarkError(RmlgenError):
    pass
