"""Exception types and source positions shared across the package."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class SourceSpan:
    """1-based position of a token in an input file."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class DaliError(Exception):
    """Base class for all errors raised by this package."""


class DaliSyntaxError(DaliError):
    """Malformed agent file, event script or system config."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class DaliValidationError(DaliError):
    """An agent program violates a structural restriction.

    Carries the full report so callers can print every issue, not just
    the first one.
    """

    def __init__(self, agent: str, report):
        self.agent = agent
        self.report = report
        lines = "; ".join(issue.message for issue in report.errors)
        super().__init__(f"agent {agent}: {lines}")


class DaliConfigError(DaliError):
    """Bad system configuration (unknown agent, undeclared event, ...)."""
