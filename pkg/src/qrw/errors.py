"""Exception types shared across the package."""


class QrwError(Exception):
    """Base class for all errors raised by this package."""


class StructureError(QrwError, ValueError):
    """A table or relation is malformed (bad shape or out-of-range entry)."""


class SizeMismatchError(QrwError, ValueError):
    """A subset's length does not match the carrier it is evaluated against."""


class EnumerationLimitError(QrwError, ValueError):
    """A power-set scan was refused because the carrier exceeds the cap."""


class ParseError(QrwError, ValueError):
    """Algebra file rejected; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
