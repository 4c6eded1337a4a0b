"""Exception types shared across the pipeline."""


class TginError(Exception):
    """Base class for all pipeline errors."""


class InvalidParameterError(TginError, ValueError):
    """A parameter is outside its documented range."""


class InvalidInputError(TginError, ValueError):
    """Input data is empty or structurally unusable."""


class UnknownItemError(TginError, KeyError):
    """An item id is not present in the graph or catalog."""

    def __str__(self) -> str:  # KeyError quotes its arg; keep plain messages
        return Exception.__str__(self)


class ParseError(TginError, ValueError):
    """A file could not be parsed; carries path and 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = path
        self.line_no = line_no


class IntegrityError(TginError, ValueError):
    """Parsed data violates a structural invariant."""


class InternalInvariantError(TginError, RuntimeError):
    """A condition that should be impossible by construction was hit."""
