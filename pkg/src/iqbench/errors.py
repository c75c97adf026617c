"""Exception hierarchy shared by every iqbench module."""


class IQBenchError(Exception):
    """Base class for all library errors."""


class EmptyClass(IQBenchError):
    def __init__(self, missing, where="dataset"):
        self.missing = missing
        super().__init__(f"{where} has no shots labeled {missing}")


class BadFraction(IQBenchError, ValueError):
    pass


class DatasetTooSmall(IQBenchError, ValueError):
    pass


class ParseError(IQBenchError):
    def __init__(self, row, column, reason):
        self.row = row
        self.column = column
        self.reason = reason
        super().__init__(f"row {row}, column {column!r}: {reason}")


class NonFiniteValue(ParseError):
    pass


class InvalidParams(IQBenchError, ValueError):
    """A parameter record violates its invariants; ``field`` names the culprit."""

    def __init__(self, field, reason):
        self.field = field
        self.reason = reason
        super().__init__(f"{field}: {reason}")


class ZeroDetuning(InvalidParams):
    def __init__(self):
        super().__init__("omega_a", "qubit and resonator frequencies coincide (zero detuning)")


class InvalidHyperparam(InvalidParams):
    pass


class NonConvergence(IQBenchError):
    def __init__(self, kind, detail):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind} did not converge: {detail}")


class DivergenceDetected(NonConvergence):
    pass


class CholeskyFailure(IQBenchError):
    pass


class DegenerateCentroids(IQBenchError):
    pass


class ProbaUnsupported(IQBenchError):
    pass


class NonFiniteInput(IQBenchError, ValueError):
    pass


class GridTooLarge(IQBenchError):
    pass


class EmptyTestSet(IQBenchError):
    pass


class SingleClass(IQBenchError):
    pass


class FoldMissingClass(IQBenchError):
    pass


class ReportValidationError(IQBenchError, ValueError):
    pass


class SplitSeedMismatch(IQBenchError):
    pass


class ConfigError(IQBenchError):
    pass


class TuningFailed(IQBenchError):
    """Every trial of a search failed."""


class IOFailure(IQBenchError, OSError):
    """A file could not be read or written; the message names the path."""
