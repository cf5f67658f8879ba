"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a geometric formula."""


class InvalidSetupError(ValueError):
    """A needle/grating configuration violates its invariants."""


class ConvergenceError(ArithmeticError):
    """Quadrature did not reach the requested tolerance."""


class FitError(ArithmeticError):
    """The deficit fit could not be carried out on the given grid."""
