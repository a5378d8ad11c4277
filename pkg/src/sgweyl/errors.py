"""Exception types raised across the package."""


class SGWeylError(Exception):
    """Base class for all package errors."""


class DomainError(SGWeylError, ValueError):
    """Argument outside the domain where a map is real-valued."""


class ConvergenceError(SGWeylError, RuntimeError):
    """An iteration did not reach its tolerance within the iterate cap."""


class OrderingError(SGWeylError, RuntimeError):
    """Eigenvalues that must be strictly ordered collided or were out of order.

    Values are distinct in exact arithmetic, so this always signals lost
    floating point precision or a wrong spectral bookkeeping rule.
    """


class CatalogExhaustedError(SGWeylError, RuntimeError):
    """The spectral catalog would need more cycles than its depth cap allows."""


class OutsideSetError(SGWeylError, ValueError):
    """A point could not be located in the open set where the exact formula holds."""


class GraphLevelError(SGWeylError, ValueError):
    """Requested graph approximation level exceeds the supported cap."""
