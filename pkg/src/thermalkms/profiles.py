"""Smearing profiles in time and space, with their Fourier transforms.

Conventions (used everywhere in the package):

* time:  T(nu) = int dt p(t) exp(+i nu t)          (nu may be complex)
* space: S(q)  = int d^3x s(x) exp(+i q.x)         isotropic about a center c,
  so S(q) = exp(i q.c) * S_rad(|q|).

A :class:`SmearingFunction` is a product ``time(t - shift) * space(x)``; the
complex ``shift`` enters only through the phase ``exp(i nu shift)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import ConfigurationError, DomainError
from .quadrature import gauss_legendre

# ---------------------------------------------------------------- time profiles


@dataclass(frozen=True)
class GaussianTime:
    """Normalized Gaussian density; ``width == 0`` is a Dirac delta."""

    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if self.width < 0:
            raise DomainError("Gaussian width must be >= 0")

    def ft(self, nu):
        nu = np.asarray(nu)
        return np.exp(1j * nu * self.center - 0.5 * (nu * self.width) ** 2)

    def value(self, t):
        if self.width == 0:
            raise ConfigurationError("a delta profile has no pointwise values")
        t = np.asarray(t, dtype=float)
        return np.exp(-0.5 * ((t - self.center) / self.width) ** 2) / (self.width * math.sqrt(2 * math.pi))

    def support(self, n_sigma: float = 9.0) -> tuple[float, float]:
        return (self.center - n_sigma * self.width, self.center + n_sigma * self.width)

    @property
    def decay_width(self) -> float:
        return self.width


@dataclass(frozen=True)
class GaussianTimeDerivative:
    """Time derivative of a normalized Gaussian: a zero-mean profile."""

    center: float = 0.0
    width: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError("Gaussian width must be > 0")

    def ft(self, nu):
        nu = np.asarray(nu)
        return -1j * nu * GaussianTime(self.center, self.width).ft(nu)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.center) / self.width
        return -u / self.width * GaussianTime(self.center, self.width).value(t)

    def support(self, n_sigma: float = 9.0) -> tuple[float, float]:
        return (self.center - n_sigma * self.width, self.center + n_sigma * self.width)

    @property
    def decay_width(self) -> float:
        return self.width


# smoothstep families S(u) on [0, 1]; values are (S, S') polynomials
_SMOOTHSTEPS = {
    "smoothstep1": (np.polynomial.Polynomial([0, 0, 3, -2])),
    "smoothstep2": (np.polynomial.Polynomial([0, 0, 0, 10, -15, 6])),
    "smoothstep3": (np.polynomial.Polynomial([0, 0, 0, 0, 35, -84, 70, -20])),
}


def _smoothstep(shape: str) -> np.polynomial.Polynomial:
    try:
        return _SMOOTHSTEPS[shape]
    except KeyError:
        raise ConfigurationError(f"unknown switch shape {shape!r}; known: {sorted(_SMOOTHSTEPS)}") from None


class _CompactProfile:
    """Profiles with compact support; FT by Gauss-Legendre over the support."""

    def _pieces(self) -> list[tuple[float, float]]:
        a, b = self.support()
        return [(a, b)]

    def _poly_pieces(self):
        """[(a, b, P)] with the profile equal to the polynomial P(t) on [a, b], if it is piecewise polynomial."""
        return None

    def ft(self, nu):
        nu = np.asarray(nu)
        flat = nu.ravel().real.astype(float) if np.iscomplexobj(nu) and not np.any(nu.imag) else nu.ravel()
        polys = _cached_pieces(self)
        if polys is not None:
            out = np.zeros(flat.shape, dtype=complex)
            for piece in polys:
                out += _poly_ft(piece, flat)
            return out.reshape(nu.shape)
        numax = float(np.max(np.abs(flat))) if flat.size else 0.0
        out = np.zeros(flat.shape, dtype=complex)
        for a, b in self._pieces():
            n = int(min(2048, 48 + 2 * numax * (b - a)))
            x, w = _gl_cached(n)
            half, mid = 0.5 * (b - a), 0.5 * (a + b)
            t = mid + half * x
            vals = self.value(t) * w * half
            out += np.exp(1j * np.outer(flat, t)) @ vals
        return out.reshape(nu.shape)


@lru_cache(maxsize=256)
def _cached_pieces(profile):
    pieces = profile._poly_pieces()
    if pieces is None:
        return None
    out = []
    for a, b, P in pieces:
        derivs, D = [], P
        for _ in range(P.degree() + 1):
            derivs.append((float(D(a)), float(D(b))))
            D = D.deriv()
        x, _w = _gl_cached(64)
        nodes = tuple(P(0.5 * (a + b) + 0.5 * (b - a) * x))
        out.append((a, b, nodes, tuple(derivs)))
    return tuple(out)


def _poly_ft(piece, nu):
    """int_a^b P(t) exp(i nu t) dt, exact.

    Low frequencies use a fixed Gauss rule (exact up to the exponential's
    truncation), high frequencies the terminating integration-by-parts sum.
    """
    a, b, _, derivs = piece
    nu = np.asarray(nu)
    out = np.zeros(nu.shape, dtype=complex)
    deg = max(len(derivs) - 1, 1)
    low = np.abs(nu) * (b - a) <= 2.0 * deg + 4.0
    if np.any(low):
        x, w = _gl_cached(64)
        half, mid = 0.5 * (b - a), 0.5 * (a + b)
        t = mid + half * x
        out[low] = np.exp(1j * np.outer(nu[low], t)) @ (_weights_cached(piece) * w * half)
    high = ~low
    if np.any(high):
        z = 1j * nu[high]
        acc_a = np.zeros(z.shape, dtype=complex)
        acc_b = np.zeros(z.shape, dtype=complex)
        zp = z.copy()
        for j, (da, db) in enumerate(derivs):
            sign = -1.0 if j % 2 else 1.0
            acc_b += sign * db / zp
            acc_a += sign * da / zp
            zp = zp * z
        out[high] = np.exp(z * b) * acc_b - np.exp(z * a) * acc_a
    return out


@lru_cache(maxsize=256)
def _weights_cached(piece):
    return np.asarray(piece[2])


@lru_cache(maxsize=32)
def _gl_cached(n):
    return gauss_legendre(n)


@dataclass(frozen=True)
class SmoothBump(_CompactProfile):
    """C-infinity bump exp(-1/(1-u^2)) on [a, b], normalized to unit integral."""

    a: float = -1.0
    b: float = 1.0

    def __post_init__(self):
        if not self.b > self.a:
            raise DomainError("SmoothBump needs a < b")

    def value(self, t):
        t = np.asarray(t, dtype=float)
        u = (2 * t - (self.a + self.b)) / (self.b - self.a)
        inside = np.abs(u) < 1
        safe = np.where(inside, u, 0.0)
        raw = np.where(inside, np.exp(-1.0 / (1.0 - safe**2)), 0.0)
        return raw / (_BUMP_NORM * 0.5 * (self.b - self.a))

    def support(self, n_sigma: float = 0.0):
        return (self.a, self.b)

    @property
    def decay_width(self) -> float:
        return 0.1 * (self.b - self.a)


_BUMP_NORM = 0.44399381616807943  # int_{-1}^{1} exp(-1/(1-u^2)) du


@dataclass(frozen=True)
class SwitchDerivative(_CompactProfile):
    """Derivative of the past switch-on of the time cutoff, supported in [-2 eps, -eps].

    Integrates to one; the switch itself rises as a smoothstep polynomial.
    """

    eps: float = 0.5
    shape: str = "smoothstep2"

    def __post_init__(self):
        if not self.eps > 0:
            raise DomainError("eps must be > 0")
        _smoothstep(self.shape)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        u = (t + 2 * self.eps) / self.eps
        d = _smoothstep(self.shape).deriv()
        return np.where((u > 0) & (u < 1), d(np.clip(u, 0, 1)) / self.eps, 0.0)

    def support(self, n_sigma: float = 0.0):
        return (-2 * self.eps, -self.eps)

    def _poly_pieces(self):
        e = self.eps
        d = _smoothstep(self.shape).deriv() / e
        # keep the polynomial in u = (t + 2 eps) / eps; expanding in t loses digits
        return [(-2 * e, -e, np.polynomial.Polynomial(d.coef, domain=[-2 * e, -e], window=[0, 1]))]

    @property
    def decay_width(self) -> float:
        return 0.2 * self.eps


@dataclass(frozen=True)
class Switch(_CompactProfile):
    """The time cutoff itself: 0 before -2 eps, 1 on [-eps, eps], 0 after 2 eps."""

    eps: float = 0.5
    shape: str = "smoothstep2"

    def __post_init__(self):
        if not self.eps > 0:
            raise DomainError("eps must be > 0")
        _smoothstep(self.shape)

    def value(self, t):
        t = np.asarray(t, dtype=float)
        s = _smoothstep(self.shape)
        rise = s(np.clip((t + 2 * self.eps) / self.eps, 0, 1))
        fall = s(np.clip((2 * self.eps - t) / self.eps, 0, 1))
        return np.minimum(rise, fall)

    def support(self, n_sigma: float = 0.0):
        return (-2 * self.eps, 2 * self.eps)

    def _pieces(self):
        e = self.eps
        return [(-2 * e, -e), (-e, e), (e, 2 * e)]

    def _poly_pieces(self):
        e = self.eps
        c = _smoothstep(self.shape).coef
        rise = np.polynomial.Polynomial(c, domain=[-2 * e, -e], window=[0, 1])
        fall = np.polynomial.Polynomial(c, domain=[e, 2 * e], window=[1, 0])
        return [(-2 * e, -e, rise), (-e, e, np.polynomial.Polynomial([1.0])), (e, 2 * e, fall)]

    @property
    def decay_width(self) -> float:
        return 0.2 * self.eps


@dataclass(frozen=True)
class ShiftIntegral:
    """Line integral of translates: int_a^b ds base(t - s), a and b complex.

    FT: base.ft(nu) * (exp(i nu b) - exp(i nu a)) / (i nu).  With a, b real this
    is a time average (times b - a); with a = 0, b = i*beta it is (i times) the
    imaginary-time integral appearing in KMS formulas.
    """

    base: "TimeProfile"
    a: complex = 0.0
    b: complex = 1.0

    def ft(self, nu):
        nu = np.asarray(nu, dtype=complex)
        return self.base.ft(nu) * shift_integral_factor(nu, self.a, self.b)

    def value(self, t):
        raise ConfigurationError("ShiftIntegral has no cheap pointwise values")

    def support(self, n_sigma: float = 9.0):
        lo, hi = self.base.support(n_sigma)
        return (lo + min(self.a.real, self.b.real), hi + max(self.a.real, self.b.real))

    @property
    def decay_width(self) -> float:
        return self.base.decay_width


def shift_integral_factor(nu, a, b):
    """(exp(i nu b) - exp(i nu a)) / (i nu), continuous at nu = 0."""
    nu = np.asarray(nu, dtype=complex)
    d = complex(b) - complex(a)
    z = 1j * nu * d
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    ratio = np.where(small, 1 + z / 2 + z**2 / 6 + z**3 / 24, np.expm1(zs) / zs)
    return np.exp(1j * nu * complex(a)) * d * ratio


TimeProfile = Union[GaussianTime, GaussianTimeDerivative, SmoothBump, SwitchDerivative, Switch, ShiftIntegral]

# --------------------------------------------------------------- space profiles


def _vec3(c) -> tuple[float, float, float]:
    c = tuple(float(x) for x in np.broadcast_to(np.asarray(c, dtype=float), (3,)))
    return c  # type: ignore[return-value]


@dataclass(frozen=True)
class GaussianSpace:
    """Normalized isotropic Gaussian density; ``width == 0`` is a point."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3(self.center))
        if self.width < 0:
            raise DomainError("Gaussian width must be >= 0")

    def radial_ft(self, k):
        return np.exp(-0.5 * (np.asarray(k) * self.width) ** 2)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - np.array(self.center)) ** 2, axis=-1)
        w = self.width
        return np.exp(-0.5 * r2 / w**2) / (2 * math.pi * w**2) ** 1.5

    @property
    def decay_width(self) -> float:
        return self.width


@dataclass(frozen=True)
class GaussianCutoff:
    """Spatial cutoff h(x) = exp(-|x - c|^2 / (2 L^2)); equals one at its center."""

    scale: float = 10.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "center", _vec3(self.center))
        if not self.scale > 0:
            raise DomainError("cutoff scale L must be > 0")

    def radial_ft(self, k):
        L = self.scale
        return (2 * math.pi * L * L) ** 1.5 * np.exp(-0.5 * (np.asarray(k) * L) ** 2)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        r2 = np.sum((x - np.array(self.center)) ** 2, axis=-1)
        return np.exp(-0.5 * r2 / self.scale**2)

    @property
    def decay_width(self) -> float:
        return self.scale


@dataclass(frozen=True)
class UnitSpace:
    """h == 1 (adiabatic limit); only usable where momentum conservation collapses the integral."""

    center: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def radial_ft(self, k):
        raise ConfigurationError(
            "the unit spatial profile has a delta-function transform; "
            "it is only allowed in momentum-conserving (collapsed) evaluations"
        )

    def value(self, x):
        return np.ones(np.shape(x)[:-1])

    @property
    def decay_width(self) -> float:
        return math.inf


SpaceProfile = Union[GaussianSpace, GaussianCutoff, UnitSpace]

# ------------------------------------------------------------ smearing function


@dataclass(frozen=True)
class SmearingFunction:
    """Separable test function ``time(t - shift) * space(x)``."""

    time: TimeProfile = field(default_factory=GaussianTime)
    space: SpaceProfile = field(default_factory=GaussianSpace)
    shift: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "shift", complex(self.shift))

    def time_ft(self, nu):
        nu = np.asarray(nu)
        return self.time.ft(nu) * np.exp(1j * nu * self.shift)

    def translate(self, s: complex) -> "SmearingFunction":
        return replace(self, shift=self.shift + complex(s))

    def conj(self) -> "SmearingFunction":
        """Complex conjugate (all profiles are real)."""
        return replace(self, shift=self.shift.conjugate())

    @property
    def is_unit_space(self) -> bool:
        return isinstance(self.space, UnitSpace)

    @property
    def time_center(self) -> complex:
        base = getattr(self.time, "center", None)
        if base is None:
            lo, hi = self.time.support()
            base = 0.5 * (lo + hi)
        return base + self.shift

    def value(self, t, x):
        """Pointwise value at real times; only for zero or real shifts."""
        if self.shift.imag != 0:
            raise DomainError("pointwise values need a real time shift")
        return self.time.value(np.asarray(t) - self.shift.real) * self.space.value(x)


def gaussian_packet(t0: float = 0.0, x0=(0.0, 0.0, 0.0), sigma_t: float = 1.0,
                    sigma_x: float = 1.0) -> SmearingFunction:
    """Convenience constructor for a Gaussian wave packet."""
    return SmearingFunction(GaussianTime(t0, sigma_t), GaussianSpace(x0, sigma_x))
