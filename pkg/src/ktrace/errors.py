"""Exception hierarchy shared by every ktrace module."""


class KTraceError(Exception):
    """Base class for all ktrace errors."""


class NotSelfAdjoint(KTraceError):
    pass


class NumericalFailure(KTraceError):
    pass


class DomainExceeded(KTraceError):
    pass


class NotProjection(KTraceError):
    pass


class NotPositive(KTraceError):
    pass


class SpectralGapViolation(KTraceError):
    pass


class NotNearProjection(KTraceError):
    pass


class TooFarApart(KTraceError):
    pass


class CornerNotInvertible(KTraceError):
    pass


class NotInvertible(KTraceError):
    pass


class RankExceedsCorner(KTraceError):
    pass


class OutsideIdeal(KTraceError):
    pass


class NotInKernel(KTraceError):
    pass


class NotStrictlyPositive(KTraceError):
    pass


class EmptyInput(KTraceError):
    pass


class NotInScale(KTraceError):
    pass


class ConfigInvalid(KTraceError):
    pass


class ParseError(KTraceError):
    """Malformed command operand; carries the 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
