"""Thermal KMS states of a free scalar field and their perturbative stability."""
from .errors import (CapacityError, ConfigurationError, DomainError, KMSError, LightConeError,
                     QuadratureError, StripError)
from .params import KernelValue, QuadratureSpec, ThermalParams

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "ConfigurationError", "DomainError", "KMSError", "LightConeError",
    "QuadratureError", "StripError", "KernelValue", "QuadratureSpec", "ThermalParams",
    "__version__",
]
