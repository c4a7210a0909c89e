"""Exception types raised by the library.

Only the CLI turns these into exit codes; everything else lets them propagate.
"""
from typing import Optional


class LasbenchError(Exception):
    """Base class for every error raised on purpose by this package."""


class ConfigurationError(LasbenchError, ValueError):
    """A search or experiment was set up in a way that cannot run."""


class InstanceParseError(LasbenchError, ValueError):
    """A TSPLIB or QAPLIB file could not be read."""

    def __init__(
        self, message: str, line: Optional[int] = None, text: Optional[str] = None, source: Optional[str] = None
    ):
        self.reason = message
        self.line = line
        self.text = text
        self.source = source
        if line is not None:
            message = f"line {line}: {message}"
            if text is not None:
                message = f"{message} ({text.strip()!r})"
        if source is not None:
            message = f"{source}: {message}"
        super().__init__(message)


class UnknownInstanceError(LasbenchError, KeyError):
    """Raised by hard registry lookups for names that are not bundled."""

    def __str__(self) -> str:
        return f"unknown benchmark instance: {self.args[0]!r}"
