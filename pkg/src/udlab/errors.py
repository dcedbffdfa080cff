class UdlabError(Exception):
    """Base class for library errors."""


class InvalidInput(UdlabError, ValueError):
    """Malformed graph/point files or out-of-range parameters."""


class BudgetExceeded(UdlabError):
    """An exact solver was asked to work above its vertex budget."""


class NoEmbeddingFound(UdlabError):
    """The numerical embedder gave up.  This is not a proof of non-realizability."""


class DegenerateDiameter(UdlabError):
    pass


class GeometryInfeasible(UdlabError):
    pass


class InadmissibleColoring(UdlabError, ValueError):
    pass


class NonMonotoneSignal(UdlabError):
    """Bisection saw probabilities invert by more than sampling noise allows."""
