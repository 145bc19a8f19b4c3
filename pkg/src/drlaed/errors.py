"""Exception hierarchy shared by all modules."""


class DrlaedError(Exception):
    """Base class for domain errors raised by the package."""


class InputError(DrlaedError, ValueError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    """A file could not be parsed; ``line`` and ``column`` are 1-based."""

    def __init__(self, message, path=None, line=None, column=None):
        where = ":".join(str(v) for v in (path, line, column) if v is not None)
        super().__init__(f"{where}: {message}" if where else message)
        self.path = path
        self.line = line
        self.column = column


class NetworkError(InputError):
    """A network description violates its structural invariants."""


class SingularNetwork(DrlaedError):
    """The reduced nodal susceptance matrix cannot be factorized."""


class DimensionMismatch(InputError):
    pass


class MissingInitialSetpoint(InputError):
    pass


class EmptyInput(InputError):
    pass


class UnsupportedNorm(InputError):
    pass


class InvalidBounds(InputError):
    pass


class NumericalBreakdown(DrlaedError):
    """The LP solver could not produce a certified answer."""


class DispatchError(DrlaedError):
    """A dispatch problem did not solve to optimality.

    The offending method name and the (non-optimal) solution object, when
    available, are attached so callers can record the outcome.
    """

    def __init__(self, message, method=None, solution=None):
        super().__init__(message)
        self.method = method
        self.solution = solution


class Infeasible(DispatchError):
    pass


class Unbounded(DispatchError):
    pass


class SolverFailure(DispatchError):
    pass
