"""Exception hierarchy.

Input problems (bad parameters, bad files) derive from ``InputError``;
numerical breakdowns derive from ``MethodError``. The CLI maps the two
families to exit codes 3 and 2.
"""

from __future__ import annotations


class HistoError(Exception):
    """Base class for all package errors."""

    kind = "error"


class InputError(HistoError, ValueError):
    kind = "input"


class InvalidParameterError(InputError):
    kind = "invalid-parameter"


class InvalidConfigurationError(InputError):
    kind = "invalid-configuration"


class DegenerateSegmentError(InputError):
    kind = "degenerate-segment"


class ParseError(InputError):
    """Malformed averages file; ``row`` is 1-based, header is row 1."""

    kind = "parse"

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class MethodError(HistoError, ArithmeticError):
    kind = "method"


class DegreeTooLargeError(MethodError):
    kind = "degree-too-large"


class NonDistinctSelectionError(MethodError):
    """Mock-Chebyshev extraction produced a repeated grid node."""

    kind = "non-distinct-nodes"


class NonDistinctSegmentsError(MethodError):
    """Two Chebyshev roots fell into the same equispaced segment."""

    kind = "non-distinct-segments"

    def __init__(self, message: str, roots: tuple[int, int] | None = None):
        self.roots = roots
        super().__init__(message)


class SingularMatrixError(MethodError):
    kind = "singular-matrix"


class UnisolvenceError(SingularMatrixError):
    kind = "unisolvence-violation"


class SingularKKTError(SingularMatrixError):
    kind = "singular-kkt"


class DataGenerationError(MethodError):
    kind = "data-generation"
