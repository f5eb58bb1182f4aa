"""Exception types raised across the package."""


class SphCesaroError(Exception):
    """Base class for all package errors."""


class DomainError(SphCesaroError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class DegreeRangeError(SphCesaroError, ValueError):
    """Degree, index or summation order outside the supported range."""


class PreconditionError(SphCesaroError, ValueError):
    """Inputs are individually valid but inconsistent with each other."""


class ResolutionError(SphCesaroError, ValueError):
    """The sampling grid is too coarse for the requested quantity."""


class IntegrabilityError(SphCesaroError, ArithmeticError):
    """Adaptive quadrature failed to converge (the integrand looks non-integrable)."""


class UnsupportedFamilyError(SphCesaroError, ValueError):
    """No reference spectrum route exists for this test-function family."""
