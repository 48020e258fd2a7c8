"""Exception hierarchy.

Every error raised by the library derives from :class:`SpilloverError`.  The
three intermediate classes map onto the CLI exit codes: configuration
problems (1), bad input data (2) and numerical failures (3).
"""

from __future__ import annotations


class SpilloverError(Exception):
    exit_code = 2


class ConfigError(SpilloverError):
    exit_code = 1


class DataError(SpilloverError):
    exit_code = 2


class NumericalError(SpilloverError):
    exit_code = 3


# --- ingest -----------------------------------------------------------------


class MissingFile(DataError):
    pass


class MalformedHeader(DataError):
    pass


class UnparseableCell(DataError):
    def __init__(self, row: int, col: str, value: str = ""):
        self.row = row
        self.col = col
        super().__init__(f"cannot parse cell at row {row}, column {col!r}: {value!r}")


class NonPositivePrice(DataError):
    def __init__(self, row: int, col: str, value: float = 0.0):
        self.row = row
        self.col = col
        super().__init__(f"non-positive level {value!r} at row {row}, column {col!r}")


class DuplicateDate(DataError):
    pass


class EmptyIntersection(DataError):
    pass


class DuplicateSeriesName(DataError):
    pass


class TooFewObservations(DataError):
    pass


class DegenerateSeries(DataError):
    pass


class InsufficientData(DataError):
    pass


# --- numerical --------------------------------------------------------------


class SingularRegression(NumericalError):
    pass


class SingularDesign(NumericalError):
    pass


class UnstableModel(NumericalError):
    pass


class NonPositiveDefiniteCovariance(NumericalError):
    pass


class NumericalBreakdown(NumericalError):
    def __init__(self, t: int, message: str = "non-finite filter state"):
        self.t = t
        super().__init__(f"{message} at t={t}")


class ZeroVariance(NumericalError):
    def __init__(self, j: int):
        self.j = j
        super().__init__(f"shock variance of series {j} is zero")


class NoEdges(NumericalError):
    pass


class NonConvergence(NumericalError):
    pass


# --- lookups / configuration --------------------------------------------------


class IndexOutOfRange(SpilloverError, IndexError):
    exit_code = 1


class UnknownBand(ConfigError, KeyError):
    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return Exception.__str__(self)


class InvalidPartition(ConfigError):
    pass


class DftTooSmall(ConfigError):
    pass
