"""Exception types shared across the package."""


class HtdError(Exception):
    """Base class for all package errors."""


class QuerySyntaxError(HtdError):
    """Raised on malformed query or fact text; carries line/column."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class DatabaseFormatError(HtdError):
    """Non-ground fact, arity mismatch, or malformed fact file."""


class DecompositionFormatError(HtdError):
    """Malformed decomposition file or dangling atom/variable reference."""


class InvalidDecompositionError(HtdError):
    """An operation required a valid decomposition and the input is not one."""


class InconclusiveError(HtdError):
    """A bounded brute-force search ran out of budget without an answer."""
