"""Exception types raised across the package."""

from __future__ import annotations


class BoxEnsembleError(Exception):
    """Base class for every error raised by this package."""


class InvalidBoxError(BoxEnsembleError, ValueError):
    pass


class DegenerateResult(BoxEnsembleError):
    """An ensembled cluster collapsed to a box with non-positive extent."""

    def __init__(self, message: str, cluster=None):
        super().__init__(message)
        self.cluster = cluster


class DuplicateModelTag(BoxEnsembleError):
    pass


class UndefinedCoefficient(BoxEnsembleError, ZeroDivisionError):
    pass


class EmptyEvaluation(BoxEnsembleError):
    pass


class ParseError(BoxEnsembleError):
    """Parse failure tied to a 1-based line of the input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        self.detail = message
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MalformedRow(ParseError):
    pass


class InvalidBox(ParseError):
    pass


class DuplicateImage(ParseError):
    pass


class ConflictingTarget(ParseError):
    pass
