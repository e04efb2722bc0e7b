"""Exception hierarchy shared by every module."""


class CycleBenchError(Exception):
    """Base class for all errors raised by cyclebench."""


class DisconnectedGraph(CycleBenchError):
    pass


class NonPositiveWeight(CycleBenchError):
    pass


class OutOfBudget(CycleBenchError):
    """The dense shortest-path tables would exceed the configured vertex cap."""


class InsufficientIndependentCircuits(CycleBenchError):
    pass


class NonSimpleCycle(CycleBenchError):
    pass


class AngleNearPi(CycleBenchError):
    """Rotation angle too close to pi for the principal logarithm."""


class JacobianSingular(CycleBenchError):
    pass


class CholeskyFailure(CycleBenchError):
    pass


class SingularSystem(CycleBenchError):
    pass


class InfeasibleRatio(CycleBenchError):
    pass


class ParseError(CycleBenchError):
    def __init__(self, line_number, reason):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class MaxIterationsExceeded(CycleBenchError):
    """Raised only on request; solvers normally report it as a flag."""


class UnknownTagWarning(UserWarning):
    """A g2o record with an unsupported tag was skipped."""
