"""Exception hierarchy shared by every module."""

from __future__ import annotations


class DfcompError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(DfcompError, ValueError):
    pass


class EmptyConditioningError(InvalidArgumentError):
    """Conditioning would leave no vector of the support set."""


class DefinedBitError(InvalidArgumentError):
    """A bit-location whose value is already known was queried."""


class AlreadySolvedError(DfcompError):
    """The function output is already determined (mu_f == 1)."""


class ValueRangeError(InvalidArgumentError, OverflowError):
    """A builtin produced a value above the configured cap."""


class ResourceLimitError(DfcompError):
    """An exact search exceeded its memo-entry or wall-clock budget."""


class ProtocolError(DfcompError):
    """Sink and informant actors fell out of step. Always a bug."""


class HardAssertionError(DfcompError, AssertionError):
    """A provable invariant was violated."""


class ParseError(InvalidArgumentError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
