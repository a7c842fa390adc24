"""Exception hierarchy.

Errors fall into two families so callers (and the CLI exit codes) can tell
bad input apart from numerical breakdown: ``DataError`` for malformed or
inconsistent inputs, ``NumericError`` for solver or training failures.
"""


class GftMpnnError(Exception):
    """Base class for every error raised by this package."""


class DataError(GftMpnnError, ValueError):
    pass


class NumericError(GftMpnnError, ArithmeticError):
    pass


# graph construction
class LoopEdgeError(DataError):
    pass


class DuplicateEdgeError(DataError):
    pass


class IndexOutOfRangeError(DataError):
    pass


class NonpositiveWeightError(DataError):
    pass


class NonSquareInputError(DataError):
    pass


class DegenerateFeaturesError(DataError):
    pass


# spectral
class DimensionMismatchError(DataError):
    pass


class NotSymmetricError(DataError):
    pass


class NoConvergenceError(NumericError):
    pass


# model
class ShapeMismatchError(DataError):
    pass


class TraceMismatchError(DataError):
    pass


class LabelOutOfRangeError(DataError):
    pass


class SingleClassDatasetError(DataError):
    pass


class NonFiniteActivationError(NumericError):
    pass


class NonFiniteLossError(NumericError):
    pass


# preprocessing / io
class UnknownCategoryError(DataError):
    pass


class InvalidSpecError(DataError):
    pass


class MalformedCsvError(DataError):
    pass


class UnknownLabelError(MalformedCsvError):
    pass


class RaggedRowError(MalformedCsvError):
    pass


class ModelDataMismatchError(DataError):
    pass


# metrics
class EmptyMatrixError(DataError):
    pass


class SingleClassInputError(DataError):
    pass
