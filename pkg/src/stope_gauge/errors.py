"""Exception types shared across the package."""

from __future__ import annotations


class StopeGaugeError(Exception):
    """Base class for every error this package raises deliberately."""


class CatalogParseError(StopeGaugeError):
    """A catalog document is syntactically or structurally unacceptable.

    ``line``/``column`` are set for JSON syntax errors; ``element`` names the
    offending catalog element (question id, domain name, ...) when known.
    """

    def __init__(
        self,
        message: str,
        *,
        line: int | None = None,
        column: int | None = None,
        element: str | None = None,
    ):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        if element is not None:
            message = f"{message} [element: {element}]"
        super().__init__(message)
        self.line = line
        self.column = column
        self.element = element


class InvalidCatalogError(StopeGaugeError):
    """A catalog failed validation with Error-severity findings."""


class UnknownQuestionError(StopeGaugeError):
    """A question id does not exist in the catalog."""


class KindMismatchError(StopeGaugeError):
    """An answer value's kind differs from the question's answer kind."""


class LevelRangeError(StopeGaugeError):
    """A level value falls outside the 0..4 scale."""


class NotAnsweredError(StopeGaugeError):
    """An operation required an existing answer and found none."""


class DigestMismatchError(StopeGaugeError):
    """A session's catalog digest does not match the catalog in hand."""


class SessionLoadError(StopeGaugeError):
    """A stored session document is malformed or inconsistent."""
