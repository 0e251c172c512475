"""Exception hierarchy shared by every ldql module.

Layer: Core
May only import from: stdlib

Every failure the engine reports deliberately derives from ``LdqlError`` so
the CLI can map it onto an exit code. Retrieval failures are not exceptions:
a lookup that cannot retrieve a document returns ``None``.
"""

from __future__ import annotations

from typing import Any


class LdqlError(Exception):
    """Base class for all errors raised by ldql."""


class ParseError(LdqlError):
    """A surface syntax could not be parsed.

    Parameters
    ----------
    message:
        What went wrong.
    line, column:
        1-based position of the offending token.
    source:
        Name of the syntax being parsed (``query``, ``pattern``, ``pp`` ...).
    """

    def __init__(self, message: str, line: int = 1, column: int = 1, source: str = "query"):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(f"{source}:{line}:{column}: {message}")


class FixtureError(LdqlError):
    """A fixture file is malformed or describes an inconsistent web."""


class WebIntegrityError(FixtureError):
    """A Web of Linked Data violates one of its structural invariants."""


class NonEnumerableResult(LdqlError):
    """A SEED ?v query would produce a binding for infinitely many URIs."""

    def __init__(self, variable: str, detail: str = ""):
        self.variable = variable
        message = f"result of SEED ?{variable} is not enumerable"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)


class NotCertified(LdqlError):
    """Execution was refused because the query could not be certified Web-safe.

    ``report`` carries the analyzer's ``SafenessReport`` with the refusal
    reasons.
    """

    def __init__(self, report: Any):
        self.report = report
        super().__init__(f"query is not certified Web-safe: {report.summary()}")


class NormalFormTooLarge(LdqlError):
    """Rewriting to UNION normal form exceeded the configured node budget."""

    def __init__(self, limit: int, size: int):
        self.limit = limit
        self.size = size
        super().__init__(
            f"UNION normal form grew to {size} nodes, above the limit of {limit}; "
            "raise --normal-form-limit to allow larger rewrites"
        )


class CertificateMismatch(LdqlError):
    """A certificate handed to the executor does not fit the query it executes."""
