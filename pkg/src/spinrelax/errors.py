"""Exception types raised by spinrelax."""


class SpinRelaxError(Exception):
    """Base class for all library errors."""


class InvalidArgumentError(SpinRelaxError, ValueError):
    """An argument violates an operation's precondition."""


class UnsupportedError(InvalidArgumentError):
    """The requested parameter combination has no defined result (e.g. a pole)."""


class InconsistentMomentsError(SpinRelaxError, ValueError):
    """Moments do not correspond to any physical (positive semidefinite) state."""


class ResourceLimitError(SpinRelaxError, RuntimeError):
    """The request exceeds a hard resource guard (e.g. brute force beyond 12 spins)."""
