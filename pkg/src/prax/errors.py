"""Shared exception types."""

from __future__ import annotations


class PraxError(Exception):
    """Base class for all package-specific errors."""


class ParseError(PraxError):
    """Malformed instance text.

    `kind` distinguishes failure classes ("syntax", "undeclared-state",
    "bad-literal", "malformed-monomial", ...); `line` and `col` are
    1-based when known, 0 otherwise.
    """

    def __init__(self, message: str, *, kind: str = "syntax", line: int = 0, col: int = 0):
        self.kind = kind
        self.line = line
        self.col = col
        where = f" (line {line}" + (f", col {col}" if col else "") + ")" if line else ""
        super().__init__(f"{message}{where}")


class InputError(PraxError):
    """A structurally valid object used with incompatible data, e.g. a word
    containing symbols outside an automaton's alphabet."""


class ConfigurationError(PraxError):
    """Incompatible spec/family/engine pairing or invalid run parameters."""


class BudgetExceededError(PraxError):
    """An enumeration or time budget was exhausted before completion."""


class ConsistencyError(PraxError):
    """An internal numeric invariant was violated beyond tolerance."""
