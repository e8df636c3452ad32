"""Exception types raised by the toolkit."""


class MemsError(Exception):
    """Base class for all toolkit errors."""


class DomainError(MemsError, ValueError):
    """An argument lies outside the domain of the operation."""


class ConsistencyError(MemsError, ValueError):
    """Parameters that must satisfy a closed-form relation do not."""


class ConvergenceError(MemsError, RuntimeError):
    """An iteration hit its cap before meeting its tolerance."""


class BracketError(MemsError, RuntimeError):
    """No sign change could be located for a bracketing root search."""


class IntegrationError(MemsError, RuntimeError):
    """A fixed-step integration left its admissible region."""


class SingularityError(MemsError, ArithmeticError):
    """The deflection came within the guard distance of touchdown (u = 1)."""


class InstabilityError(MemsError, RuntimeError):
    """An explicit time step blew up."""
