"""Ergodic mean of the n-th order nested-commutator term in the adiabatic limit.

The dominant reduced kernel of

    Q_T^(n)(A) = (1/T) int_{T S_{n+1}} w([K_{t_1}, [..., [K_{t_n}, A_{t_{n+1}}]]])

for a zero-mean quadratic ``A = int f phi^2`` is

    int d^3p (b_+ + b_-) / w^{n+1} [Phi_+ e^{2iw(t_1 - t_{n+1})} + (-1)^n Phi_- e^{-2iw(t_1 - t_{n+1})}],

with ``Phi_+ = chi'^(-w) f^(w, p)`` and ``Phi_- = chi'^(w) f^(-w, p)``; the
overall constant is set to one.  The ordered-simplex integral of the phase is
done in closed form (:func:`simplex_phase_integral`).
"""
from __future__ import annotations

import math

import numpy as np

from .errors import CapacityError, ConfigurationError, DomainError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import SmearingFunction, UnitSpace
from .quadrature import SimplexQuadrature, gauss_legendre, gauss_panels
from .kernels import bose_factors

MAX_GROWTH_ORDER = 3


def _moment_integral(k: int, a: complex, T: float):
    """J_k = int_0^T D^k exp(-i a D) dD, closed form away from a T = 0."""
    a = np.asarray(a, dtype=complex)
    z = 1j * a * T
    small = np.abs(z) < 8.0
    out = np.empty(a.shape, dtype=complex)
    if np.any(~small):
        zz = z[~small]
        partial = sum(zz**j / math.factorial(j) for j in range(k + 1))
        out[~small] = math.factorial(k) / (1j * a[~small]) ** (k + 1) * (1 - np.exp(-zz) * partial)
    if np.any(small):
        x, w = gauss_legendre(48)
        D = 0.5 * T * (x + 1)
        phase = np.exp(-1j * np.outer(a[small], D))
        out[small] = phase @ (0.5 * T * w * D**k)
    return out


def simplex_phase_integral(n: int, a, T: float):
    """int_{0<t_1<...<t_{n+1}<T} exp(-i a (t_{n+1} - t_1)) = [T J_{n-1} - J_n] / (n-1)!."""
    if n < 1:
        raise DomainError("the phase integral needs n >= 1")
    return (T * _moment_integral(n - 1, a, T) - _moment_integral(n, a, T)) / math.factorial(n - 1)


def simplex_phase_constant(n: int, a, T: float):
    """Non-oscillating part of :func:`simplex_phase_integral`: T/(ia)^n - n/(ia)^{n+1}."""
    a = np.asarray(a, dtype=complex)
    return T / (1j * a) ** n - n / (1j * a) ** (n + 1)


def simplex_phase_brute(n: int, a: complex, T: float, nodes: int = 40) -> complex:
    """Direct (n+1)-dimensional ordered-simplex quadrature of the same phase."""
    pts, wts = SimplexQuadrature(n + 1, nodes).rule(T)
    return complex(np.sum(wts * np.exp(-1j * a * (pts[:, -1] - pts[:, 0]))))


def _check_observable(f: SmearingFunction, spec):
    if abs(complex(f.time.ft(0.0))) > 1e-12:
        raise ConfigurationError("the growth experiment needs a zero-mean time profile for A")
    if isinstance(f.space, UnitSpace):
        raise ConfigurationError("A needs a localized spatial profile")
    if not spec.adiabatic:
        raise ConfigurationError("the growth experiment is defined in the adiabatic limit (L = None)")


def growth_components(n: int, f: SmearingFunction, spec, params: ThermalParams, T: float,
                      quad: QuadratureSpec | None = None, panels: int | None = None):
    """(constant, oscillating_plus, oscillating_minus) parts of Q_T^(n).

    The radial momentum integral uses composite Gauss panels; the panel count
    is doubled once and the change is returned as the error estimate.
    """
    if not 1 <= n <= MAX_GROWTH_ORDER:
        raise CapacityError(f"Q_T^(n) is implemented for 1 <= n <= {MAX_GROWTH_ORDER}")
    _check_observable(f, spec)
    chi = spec.generator_kernel()
    kmax = 12.0 / max(min(f.space.decay_width, f.time.decay_width), 1e-3)
    kmax = max(kmax, 40.0 * params.m)

    def parts(n_panels):
        p, wp = gauss_panels(0.0, kmax, n_panels)
        w = np.hypot(p, params.m)
        bp, bm = bose_factors(p, params)
        meas = 4 * math.pi * p * p * wp * (bp + bm) / w ** (n + 1)
        space = f.space.radial_ft(p)
        phi_p = chi.time_ft(-w) * f.time_ft(w) * space
        phi_m = chi.time_ft(w) * f.time_ft(-w) * space
        sgn = (-1) ** n
        out = []
        for a, phi, s in ((2 * w, phi_p, 1.0), (-2 * w, phi_m, sgn)):
            full = simplex_phase_integral(n, a, T)
            const = simplex_phase_constant(n, a, T)
            out.append((np.sum(meas * s * phi * const) / T, np.sum(meas * s * phi * (full - const)) / T))
        return out[0][0] + out[1][0], out[0][1], out[1][1]

    base = panels or max(64, int(4 * kmax * T / math.pi))
    coarse, fine = parts(base), parts(2 * base)
    errs = [abs(x - y) for x, y in zip(fine, coarse)]
    return tuple(KernelValue(complex(v), float(e)) for v, e in zip(fine, errs))


def growth_Q(n: int, f: SmearingFunction, spec, params: ThermalParams, T: float,
             quad: QuadratureSpec | None = None) -> KernelValue:
    const, plus, minus = growth_components(n, f, spec, params, T, quad)
    return const + plus + minus


def growth_amplitude(n: int, f: SmearingFunction, spec, params: ThermalParams, T: float,
                     quad: QuadratureSpec | None = None) -> KernelValue:
    """Envelope of the oscillating part: |plus| + |minus| of the counter-rotating pieces."""
    _, plus, minus = growth_components(n, f, spec, params, T, quad)
    return KernelValue(abs(plus.value) + abs(minus.value), plus.err_estimate + minus.err_estimate)
