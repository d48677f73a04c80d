"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class CodemixError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CodemixError):
    """Invalid configuration, CLI usage, or missing input files."""


class DataError(CodemixError):
    """Malformed corpus data or incompatible persisted artifacts."""


class ParseError(DataError):
    """Input text that violates an expected file format."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(CodemixError):
    """Training produced a non-finite value."""
