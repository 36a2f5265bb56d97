from typing import Any


class EntropicQCError(Exception):
    """Base class for every error raised by entropic_qc"""


class NotSquareError(EntropicQCError, ValueError):
    pass


class DimMismatchError(EntropicQCError, ValueError):
    pass


class NotPositiveError(EntropicQCError, ValueError):
    pass


class TraceZeroError(EntropicQCError, ValueError):
    pass


class BadSubsystemIndexError(EntropicQCError, IndexError):
    pass


class ConvergenceError(EntropicQCError, ArithmeticError):
    pass


class NotNormalizedError(EntropicQCError, ValueError):
    pass


class BadIndicesError(EntropicQCError, ValueError):
    pass


class SupportViolationError(EntropicQCError, ArithmeticError):
    pass


class PreconditionUnmetError(EntropicQCError, ValueError):
    pass


class BadLengthError(EntropicQCError, ValueError):
    pass


class BadParameterError(EntropicQCError, ValueError):
    pass


class BadKindError(EntropicQCError, ValueError):
    pass


class StateParseError(EntropicQCError, ValueError):
    pass


class OptimizerDivergenceError(EntropicQCError, ArithmeticError):
    """No restart of the optimizer converged.

    The best value found is still available on :attr:`result`.
    """

    def __init__(self, message: str, result: Any):
        super().__init__(message)
        self.result = result
