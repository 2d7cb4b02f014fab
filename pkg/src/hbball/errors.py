"""Exception hierarchy shared across the package."""


class HBError(Exception):
    """Base class for all package errors."""


class DimensionError(HBError, ValueError):
    """Vector lengths or symbol dimensions disagree."""


class DomainError(HBError, ValueError):
    """A point lies outside the region where an operation is defined."""


class SingularityError(HBError, ArithmeticError):
    """A kernel was evaluated too close to its singular set ``<z, w> = 1``."""

    def __init__(self, msg, condition_hint):
        super().__init__(msg)
        self.condition_hint = condition_hint


class ConfigurationError(HBError, ValueError):
    """A point configuration is degenerate (e.g. coincident points)."""


class UnsupportedError(HBError, TypeError):
    """The requested operation needs data the symbol does not carry."""


class SolverError(HBError, RuntimeError):
    """An iterative solver hit its iteration cap.

    ``best`` holds the last iterate.
    """

    def __init__(self, msg, best=None):
        super().__init__(msg)
        self.best = best
