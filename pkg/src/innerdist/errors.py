"""Exception hierarchy. The CLI maps these onto its exit-code contract."""


class InnerdistError(Exception):
    """Base class for all library errors."""


class ParameterError(InnerdistError, ValueError):
    """Invalid construction or configuration parameter."""


class DegeneratePointError(InnerdistError, ValueError):
    """A point coincides with a frame origin or another degeneracy."""


class DomainError(InnerdistError, ValueError):
    """Query point violates an oracle precondition (outside ambient, on an
    obstacle interior, outside the cone, ...)."""


class UnreachableError(InnerdistError, RuntimeError):
    """No admissible path exists between the query points."""


class SearchFailureError(InnerdistError, RuntimeError):
    """A stochastic search found no feasible candidate; reported, not fatal."""


class NotConvergedError(InnerdistError, RuntimeError):
    """An offset schedule did not reach its Cauchy tolerance."""


class SceneFormatError(InnerdistError, ValueError):
    """A scene document is malformed or has an unsupported version."""
