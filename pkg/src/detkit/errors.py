"""Exception hierarchy shared by the library and the command line tool."""

from __future__ import annotations


class DetkitError(Exception):
    """Base class for all errors raised by detkit."""

    exit_code = 2


class ParseError(DetkitError):
    """Malformed polynomial text or problem file."""

    exit_code = 2

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        elif column is not None:
            where = f"column {column}: "
        super().__init__(where + message)


class ContextMismatchError(DetkitError, ValueError):
    """Operands live in different variable contexts."""


class ResourceLimitError(DetkitError):
    """A configured computation budget was exhausted.

    Raised instead of returning a partial answer.
    """

    exit_code = 3


class HypothesisError(DetkitError):
    """The input violates the hypotheses a computation relies on.

    ``evidence`` carries a JSON-friendly description of the counterexample
    (for instance the residual and order of an unsolvable lifting step).
    """

    exit_code = 1

    def __init__(self, message: str, evidence: dict | None = None):
        super().__init__(message)
        self.evidence = evidence or {}


class VerificationError(DetkitError):
    """A certificate failed to re-expand."""

    exit_code = 1

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class BoxTooSmallError(DetkitError):
    """A brute-force check cannot be conclusive inside the requested box."""

    exit_code = 3
