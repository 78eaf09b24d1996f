"""Exception hierarchy.

Errors split into two families so the CLI can map them to exit codes:
``InputError`` (bad files, arguments, preconditions) and ``NumericalError``
(rank deficiency, degenerate variance and similar failures of the data).
"""


class ScaleLabError(Exception):
    """Base class for every error raised by scalelab."""


class InputError(ScaleLabError):
    pass


class NumericalError(ScaleLabError):
    pass


class ParseError(InputError):
    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class SchemaError(InputError):
    pass


class DataValueError(InputError, ValueError):
    pass


class MissingField(InputError):
    pass


class EmptyInput(InputError, ValueError):
    pass


class DimensionMismatch(InputError, ValueError):
    pass


class InvalidParameter(InputError, ValueError):
    pass


class InvalidColumn(InputError, IndexError):
    pass


class InvalidRange(InputError, ValueError):
    pass


class InsufficientPoints(InputError):
    pass


class InsufficientFrontier(InputError):
    pass


class NonPositiveValue(InputError, ValueError):
    pass


class SampleTooSmall(InputError):
    pass


class RankDeficient(NumericalError):
    def __init__(self, rank, cols=None):
        self.rank = rank
        self.cols = cols
        msg = f"design matrix is rank deficient (rank {rank}"
        msg += f" < {cols} columns)" if cols is not None else ")"
        super().__init__(msg)


class SingularMatrix(NumericalError):
    pass


class DegenerateVariance(NumericalError):
    pass


class DegenerateResiduals(NumericalError):
    pass


class ZeroVariance(NumericalError):
    def __init__(self, column):
        self.column = column
        super().__init__(f"column {column!r} has zero variance")


class CollinearAugmentation(NumericalError):
    pass


class TooFewValidResamples(NumericalError):
    pass


class ExtrapolationWarning(UserWarning):
    """Prediction point has higher leverage than any training row."""
