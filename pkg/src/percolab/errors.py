"""Exception hierarchy.

Two families: :class:`ValidationError` for bad inputs (CLI exit code 1) and
:class:`RuntimeFailure` for budgets/convergence failures at run time (exit 2).
"""


class PercolabError(Exception):
    pass


class ValidationError(PercolabError, ValueError):
    pass


class RuntimeFailure(PercolabError, RuntimeError):
    pass


# graph construction
class OutOfRange(ValidationError):
    pass


class SelfLoop(ValidationError):
    pass


class DuplicateEdge(ValidationError):
    pass


class DimensionTooLarge(ValidationError):
    pass


class ParityViolation(ValidationError):
    pass


class DegreeTooLarge(ValidationError):
    pass


class ParameterConflict(ValidationError):
    pass


class NotDivisible(ValidationError):
    pass


class TooFewClasses(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class InvariantViolation(ValidationError):
    pass


class RestartBudgetExceeded(RuntimeFailure):
    pass


class RepairBudgetExceeded(RuntimeFailure):
    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


# analytics
class InvalidProbability(ValidationError):
    pass


class SprinkleTooLarge(ValidationError):
    pass


class DegenerateDenominator(ValidationError):
    pass


class NonConvergence(RuntimeFailure):
    pass


class NotSupercriticalWarning(UserWarning):
    pass


# percolation
class UniverseMismatch(ValidationError):
    pass


class StreamExhausted(RuntimeFailure):
    pass


# audit
class BudgetExceeded(RuntimeFailure):
    def __init__(self, message, visited=0, partial=None):
        super().__init__(message)
        self.visited = visited
        self.partial = partial


class NotRegular(ValidationError):
    pass


class InvalidLambda(ValidationError):
    pass
