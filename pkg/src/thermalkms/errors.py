"""Exception hierarchy shared by all modules."""


class KMSError(Exception):
    """Base class for all errors raised by thermalkms."""


class DomainError(KMSError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class LightConeError(DomainError):
    """Point pair too close to the light cone (singular support of the kernel)."""


class StripError(DomainError):
    """Imaginary time shift outside the analyticity strip."""


class ConfigurationError(KMSError, ValueError):
    """Inconsistent or incomplete configuration (e.g. missing Fourier data)."""


class CapacityError(KMSError):
    """Request exceeds an implemented capacity limit."""


class QuadratureError(KMSError, ArithmeticError):
    """Numerical integration failed to reach the requested tolerance."""
