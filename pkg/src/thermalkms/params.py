"""Parameter records: thermal state, quadrature policy, kernel values."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class ThermalParams:
    """Mass and inverse temperature of the free KMS state.

    ``vacuum=True`` selects the beta -> infinity kernel; ``beta`` is then
    ignored by the Bose factors but still has to be a positive number.
    """

    m: float = 1.0
    beta: float = 1.0
    vacuum: bool = False

    def __post_init__(self):
        if not (self.m > 0 and math.isfinite(self.m)):
            raise DomainError(f"mass must be positive and finite, got {self.m!r}")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise DomainError(f"beta must be positive and finite, got {self.beta!r}")

    @classmethod
    def vacuum_state(cls, m: float = 1.0) -> "ThermalParams":
        return cls(m=m, beta=1.0, vacuum=True)


_METHODS = ("adaptive", "filon")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and momentum cutoff policy for every 1D/2D kernel integral.

    ``k_max`` fixes the radial cutoff explicitly; when it is ``None`` the
    cutoff is resolved per integrand so that Gaussian and Bose suppression
    factors fall below ``eps_cut`` relative to their peak.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    k_max: float | None = None
    eps_cut: float = 1e-10
    oscillatory_method: str = "adaptive"
    max_subdivisions: int = 4000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ConfigurationError("rel_tol and abs_tol must be positive")
        if self.k_max is not None and not (0 < self.k_max < math.inf):
            raise ConfigurationError("k_max must be positive and finite")
        if not (0 < self.eps_cut < 1):
            raise ConfigurationError("eps_cut must lie in (0, 1)")
        if self.oscillatory_method not in _METHODS:
            raise ConfigurationError(
                f"oscillatory_method must be one of {_METHODS}, got {self.oscillatory_method!r}"
            )

    def scaled(self, factor: float) -> "QuadratureSpec":
        """Return a copy with both tolerances multiplied by ``factor``."""
        return replace(self, rel_tol=self.rel_tol * factor, abs_tol=self.abs_tol * factor)

    def cut_exponent(self) -> float:
        """Value x with exp(-x) == eps_cut."""
        return -math.log(self.eps_cut)


@dataclass(frozen=True)
class KernelValue:
    """A complex number together with a (non-rigorous) quadrature error estimate."""

    value: complex
    err_estimate: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        if not self.err_estimate >= 0:
            raise DomainError("err_estimate must be nonnegative")

    def __add__(self, other):
        if isinstance(other, KernelValue):
            return KernelValue(self.value + other.value, self.err_estimate + other.err_estimate)
        return KernelValue(self.value + complex(other), self.err_estimate)

    __radd__ = __add__

    def __neg__(self):
        return KernelValue(-self.value, self.err_estimate)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, KernelValue):
            err = abs(self.value) * other.err_estimate + abs(other.value) * self.err_estimate
            err += self.err_estimate * other.err_estimate
            return KernelValue(self.value * other.value, err)
        c = complex(other)
        return KernelValue(self.value * c, abs(c) * self.err_estimate)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, KernelValue):
            q = self.value / other.value
            err = (self.err_estimate + abs(q) * other.err_estimate) / abs(other.value)
            return KernelValue(q, err)
        c = complex(other)
        return KernelValue(self.value / c, self.err_estimate / abs(c))

    def conjugate(self) -> "KernelValue":
        return KernelValue(self.value.conjugate(), self.err_estimate)

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag

    def __abs__(self):
        return abs(self.value)

    def as_row(self) -> tuple[float, float, float]:
        """(re, im, err) triple used by the CSV writers."""
        return (self.value.real, self.value.imag, self.err_estimate)
