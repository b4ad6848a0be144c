"""Exception types raised by the engine."""


class CdkError(Exception):
    """Base class for all engine errors."""


class DimensionMismatch(CdkError):
    pass


class ShapeMismatch(CdkError):
    pass


class ExactModeUnsupportedPrimitive(CdkError):
    """A transcendental node reached exact (rational) evaluation."""


class MonadMismatch(CdkError):
    pass


class NotACDM(CdkError):
    """The monad failed its Cartesian differential monad checks."""


class NotAnAlgebra(CdkError):
    pass


class ParseError(CdkError):
    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column
