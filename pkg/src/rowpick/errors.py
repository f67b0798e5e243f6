"""Exception types shared across the library."""


class RowpickError(Exception):
    """Base class for every error raised by this library."""


class EmptyMatrixError(RowpickError, ValueError):
    """A matrix argument has zero columns (or rows) where content is required."""


class DimensionMismatchError(RowpickError, ValueError):
    """Operand shapes are incompatible."""


class RankDeficientError(RowpickError, ValueError):
    """A factor that must have full numerical rank does not."""


class RankDeficientUpdateError(RankDeficientError):
    """An appended column lies numerically in the span of the absorbed ones."""


class InvalidSparsityError(RowpickError, ValueError):
    """Row sparsity does not divide the embedding dimension, or exceeds it."""


class InvalidParamError(RowpickError, ValueError):
    """A scalar parameter is out of its documented range."""


class DegenerateDistributionError(RowpickError, ValueError):
    """All sampling weights are zero; no distribution exists."""


class NotOrthonormalError(RowpickError, ValueError):
    """An input required to have orthonormal columns does not."""


class NotPSDError(RowpickError, ValueError):
    """A kernel matrix has an eigenvalue materially below zero."""


class TooLargeError(RowpickError, ValueError):
    """An enumeration guard tripped; the instance is beyond desk scale."""


class MaxRoundsExceededError(RowpickError, RuntimeError):
    """The block rejection sampler hit its round cap without completing."""


class ParseError(RowpickError, ValueError):
    """A data file is malformed.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class RaggedTableError(ParseError):
    """A table row has a different number of fields than the header."""
