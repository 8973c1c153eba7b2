class Chi2CavityError(Exception):
    """Base class for errors raised by chi2cavity."""


class DomainError(Chi2CavityError, ValueError):
    """An input lies outside the domain where the operation is defined."""


class ResourceError(Chi2CavityError, RuntimeError):
    """A request would exceed a step, grid or memory limit."""
