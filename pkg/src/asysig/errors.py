"""Exception hierarchy shared by every asysig module."""


class AsysigError(Exception):
    """Base class. ``line``/``col`` are filled in when the error comes from text input."""

    def __init__(self, message="", *, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            where = f"line {line}" + (f", column {col}" if col is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


# signal core
class ConstantSignal(AsysigError, ValueError):
    pass


class WidthMismatch(AsysigError, ValueError):
    pass


class BadWindow(AsysigError, ValueError):
    pass


class NonIncreasingTimes(AsysigError, ValueError):
    pass


class NoOpSwitch(AsysigError, ValueError):
    pass


# systems
class NotDeterministic(AsysigError):
    pass


class InadmissibleInput(AsysigError):
    pass


class GridTooCoarse(AsysigError):
    pass


class BudgetExceeded(AsysigError):
    pass


# checkers
class MissingBounds(AsysigError, ValueError):
    pass


class UnstableEnumeration(AsysigError):
    """Two enumerations of the same ``f(u)`` disagreed (the reflexive pair ``(u, u)`` failed)."""


class NotASubsystem(AsysigError):
    pass


# constructions
class PreconditionFailed(AsysigError):
    pass


class EmptyNormalizedDomain(AsysigError):
    pass


class IllDefinedExtension(AsysigError):
    def __init__(self, message, *, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class HypothesisEFailed(AsysigError):
    def __init__(self, message, *, equation=None, state=None):
        super().__init__(message)
        self.equation = equation
        self.state = state


class ConclusionFailed(AsysigError):
    def __init__(self, message, *, report=None):
        super().__init__(message)
        self.report = report


class OracleContractViolation(AsysigError):
    pass


class RaceDetected(AsysigError):
    pass


# text formats
class DslSyntaxError(AsysigError, SyntaxError):
    pass


class UnknownKind(AsysigError, ValueError):
    pass


class BadParameter(AsysigError, ValueError):
    pass


class BadRange(AsysigError, ValueError):
    pass
