"""Exception hierarchy shared by all solver and analysis modules."""


class WeingartenError(Exception):
    """Base class for all package errors."""


class DomainError(WeingartenError):
    """A curvature relation was evaluated outside its (extended) domain,
    or the reflection extension could not be constructed."""


class StepFailure(WeingartenError):
    """The adaptive ODE controller could not take an acceptable step."""


class RegimeError(WeingartenError):
    """An operation was asked for in the wrong growth regime."""


class GeometryError(WeingartenError):
    """Invalid computational domain (non-convex, degenerate, ...)."""


class ContinuationStall(WeingartenError):
    """The continuation parameter could not be advanced after repeated
    bisection of the step."""

    def __init__(self, message, t=None, trace=None):
        super().__init__(message)
        self.t = t
        self.trace = trace


class SingularJacobian(WeingartenError):
    """The Newton linear system could not be solved."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class WindowError(WeingartenError):
    """A fitting window contains too few radii or is too narrow."""


class OrderingError(WeingartenError):
    """Comparison inputs violate the required nodewise ordering."""


class HemisphereError(WeingartenError):
    """Gauss map of a solution leaves the configured open hemisphere."""


class ParseError(WeingartenError):
    """Run-file syntax or schema violation, with source position."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.line = line
        self.column = column
