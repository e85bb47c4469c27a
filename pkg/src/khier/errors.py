"""Shared exception types."""

from __future__ import annotations


class KhierError(Exception):
    """Base class for all errors raised by this package."""


class HierarchyError(KhierError):
    """Invalid hierarchy construction or use."""


class NetworkError(KhierError):
    """Invalid routing network (disconnected, cyclic tree, bad edge...)."""


class OracleUndefinedError(KhierError):
    """A table oracle was queried on a subset it does not define."""

    def __init__(self, subset):
        self.subset = frozenset(subset)
        names = " ".join(sorted(self.subset)) if self.subset else "(empty)"
        super().__init__(f"multicast cost undefined for subset {{{names}}}")


class CostOverflowError(KhierError):
    """A cost computation left the unsigned 64-bit range."""


class BruteForceCapError(KhierError):
    """Member count exceeds the exact-solver cap."""


class InfeasibleError(KhierError):
    """The requested operation cannot run on this input."""


class ParseError(KhierError):
    """Malformed instance or hierarchy text."""

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
