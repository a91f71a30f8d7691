"""First-order Bogoliubov map for the quadratic interaction.

For ``V = (1/2) int g phi^2`` with ``g = h chi`` and an observable ``F`` of
degree at most two,

    R_V(F) = F + lambda R1(F) + O(lambda^2),   R1(F) = i (T(V F) - V * F).

The time-ordered minus star-ordered contraction of a leg ``f`` with the
interaction vertex ``y`` is ``i Delta_R(f, y)``; it vanishes unless ``f``
reaches into the future of ``y``.  Hence

    R1(phi(f)) = -phi(u_f),  u_f(y) = g(y) Delta_R(f, y),

and for ``F = phi(f) phi(g')`` one gets ``-phi(u_f) phi(g') - phi(f) phi(u_g')``
plus the double-contraction scalar

    i int g(y) [i Delta_R(f,y) w(y,g') + i w(y,f) Delta_R(g',y) - Delta_R(f,y) Delta_R(g',y)].

The smeared fields ``phi(u)`` are not Gaussian; they are kept as
:class:`RetardedLeg` records whose profiles are evaluated on a (y0, r) grid
around a common spatial center.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import Observable
from .errors import CapacityError, ConfigurationError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import GaussianSpace, GaussianTime, SmearingFunction
from .quadrature import gauss_legendre
from .series import FormalSeries
from .kernels import _forward_fourier_of_gaussian, bose_factors
from .perturbation import InteractionSpec


@dataclass(frozen=True)
class _Grid:
    y0: np.ndarray
    wy0: np.ndarray
    r: np.ndarray
    wr: np.ndarray
    k: np.ndarray
    wk: np.ndarray


def _leg_geometry(f: SmearingFunction):
    if not isinstance(f.time, GaussianTime) or not isinstance(f.space, GaussianSpace):
        raise ConfigurationError("the Bogoliubov map needs Gaussian legs")
    if f.shift.imag != 0:
        raise ConfigurationError("the Bogoliubov map needs real time shifts")
    return f.time.center + f.shift.real, f.time.width, f.space.width, np.asarray(f.space.center)


def _build_grid(legs, spec: InteractionSpec, n: int) -> _Grid:
    e = spec.eps
    x, w = gauss_legendre(n)
    y0, wy0 = [], []
    for a, b in ((-2 * e, -e), (-e, e), (e, 2 * e)):
        y0.append(0.5 * (a + b) + 0.5 * (b - a) * x)
        wy0.append(0.5 * (b - a) * w)
    geo = [_leg_geometry(f) for f in legs]
    reach = max(abs(t) + 2 * e + 8 * (st + sx) for t, st, sx, _ in geo)
    if spec.L is not None:
        reach = min(reach, 9 * spec.L)
    rx, rw = gauss_legendre(4 * n)
    r = 0.5 * reach * (rx + 1)
    sx_min = min(max(sx, 1e-3) for _, _, sx, _ in geo)
    st_min = min(max(st, 1e-3) for _, st, _, _ in geo)
    kmax = 9.0 / min(sx_min, st_min)
    kx, kw = gauss_legendre(max(8 * n, int(2 * kmax * reach / math.pi) + 64))
    return _Grid(np.concatenate(y0), np.concatenate(wy0), r, 0.5 * reach * rw,
                 0.5 * kmax * (kx + 1), 0.5 * kmax * kw)


def _radial_matrix(grid: _Grid, sx: float) -> np.ndarray:
    """(1/2 pi^2) k^2 sinc(k r) s_f(k) quadrature weights, shape (r, k)."""
    kr = np.outer(grid.r, grid.k)
    sinc = np.sinc(kr / math.pi)
    return sinc * (grid.k**2 * np.exp(-0.5 * (grid.k * sx) ** 2) * grid.wk)[None, :] / (2 * math.pi**2)


def retarded_profile(f: SmearingFunction, grid: _Grid, params: ThermalParams) -> np.ndarray:
    """Delta_R(f, y) on the grid, shape (y0, r); y is a point, f the later argument."""
    t, st, sx, _ = _leg_geometry(f)
    w = np.hypot(grid.k, params.m)
    J = np.stack([np.imag(_forward_fourier_of_gaussian(w, t - y, st)) for y in grid.y0])
    return -(J / w[None, :]) @ _radial_matrix(grid, sx).T


def wightman_profile(f: SmearingFunction, grid: _Grid, params: ThermalParams) -> np.ndarray:
    """w(y, f) on the grid, y a point standing to the left of f."""
    t, st, sx, _ = _leg_geometry(f)
    w = np.hypot(grid.k, params.m)
    bp, bm = bose_factors(grid.k, params)
    tf = lambda nu: np.exp(1j * nu * t - 0.5 * (nu * st) ** 2)
    phase_p = np.exp(-1j * np.outer(grid.y0, w)) * (bp * tf(w) / (2 * w))[None, :]
    phase_m = np.exp(1j * np.outer(grid.y0, w)) * (bm * tf(-w) / (2 * w))[None, :]
    return (phase_p + phase_m) @ _radial_matrix(grid, sx).T


def _coupling(spec: InteractionSpec, grid: _Grid) -> np.ndarray:
    """g(y) = chi(y0) h(r), shape (y0, r)."""
    chi = spec.interaction_kernel().time.value(grid.y0)
    if spec.L is None:
        h = np.ones_like(grid.r)
    else:
        h = np.exp(-0.5 * (grid.r / spec.L) ** 2)
    return np.outer(chi, h)


def _measure(grid: _Grid) -> np.ndarray:
    return np.outer(grid.wy0, 4 * math.pi * grid.r**2 * grid.wr)


@dataclass(frozen=True)
class RetardedLeg:
    """phi(u) with u(y) = g(y) Delta_R(source, y)."""

    source: SmearingFunction
    spec: InteractionSpec

    def profile(self, params: ThermalParams, n: int = 24) -> tuple[_Grid, np.ndarray]:
        grid = _build_grid([self.source], self.spec, n)
        return grid, _coupling(self.spec, grid) * retarded_profile(self.source, grid, params)

    def sup_norm(self, params: ThermalParams, n: int = 24) -> float:
        return float(np.max(np.abs(self.profile(params, n)[1])))

    def l1_norm(self, params: ThermalParams, n: int = 24) -> float:
        grid, u = self.profile(params, n)
        return float(np.sum(np.abs(u) * _measure(grid)))


@dataclass(frozen=True)
class FirstOrderCorrection:
    """sum_j c_j phi(u_j) * (other legs)_j + scalar."""

    fields: tuple[tuple[complex, RetardedLeg, tuple[SmearingFunction, ...]], ...] = ()
    scalar: KernelValue = KernelValue(0.0)

    def is_zero(self, params: ThermalParams | None = None, atol: float = 0.0) -> bool:
        if not self.fields:
            return abs(self.scalar.value) <= atol
        if params is None:
            return False
        mass = sum(abs(c) * leg.l1_norm(params) for c, leg, _ in self.fields)
        return mass <= atol and abs(self.scalar.value) <= atol

    def zero_like(self) -> "FirstOrderCorrection":
        return FirstOrderCorrection()

    def __add__(self, other: "FirstOrderCorrection") -> "FirstOrderCorrection":
        return FirstOrderCorrection(self.fields + other.fields, self.scalar + other.scalar)

    def scale(self, c) -> "FirstOrderCorrection":
        return FirstOrderCorrection(tuple((c * a, leg, rest) for a, leg, rest in self.fields),
                                    self.scalar * c)


def _scalar_term(f, g, spec, params, n) -> complex:
    grid = _build_grid([f, g], spec, n)
    dr_f, dr_g = retarded_profile(f, grid, params), retarded_profile(g, grid, params)
    w_f, w_g = wightman_profile(f, grid, params), wightman_profile(g, grid, params)
    inner = 1j * dr_f * w_g + 1j * w_f * dr_g - dr_f * dr_g
    return complex(1j * np.sum(_coupling(spec, grid) * inner * _measure(grid)))


def double_contraction(f: SmearingFunction, g: SmearingFunction, spec: InteractionSpec,
                       params: ThermalParams, quad: QuadratureSpec | None = None,
                       n: int = 24) -> KernelValue:
    """Scalar part of R1(phi(f) phi(g)); the grid is refined once for an error estimate."""
    centers = [_leg_geometry(h)[3] for h in (f, g)] + [np.asarray(spec.center)]
    if any(np.linalg.norm(c - centers[0]) > 1e-12 for c in centers[1:]):
        raise CapacityError("the double contraction needs f, g and h on a common spatial center")
    coarse = _scalar_term(f, g, spec, params, n)
    fine = _scalar_term(f, g, spec, params, 2 * n)
    return KernelValue(fine, abs(fine - coarse))


def bogoliubov_first_order(F: Observable, spec: InteractionSpec, params: ThermalParams,
                           quad: QuadratureSpec | None = None, n: int = 24) -> FormalSeries:
    """(F, R1(F)) as a series truncated at order lambda."""
    if F.degree > 2:
        raise CapacityError("the Bogoliubov map is implemented for observables of degree <= 2")
    corr = FirstOrderCorrection()
    for mono in F.monomials:
        c = complex(mono.coefficient.value)
        legs = tuple(mono.legs)
        if len(legs) == 1:
            corr = corr + FirstOrderCorrection(((-c, RetardedLeg(legs[0], spec), ()),))
        elif len(legs) == 2:
            f, g = legs
            corr = corr + FirstOrderCorrection(
                ((-c, RetardedLeg(f, spec), (g,)), (-c, RetardedLeg(g, spec), (f,))),
                double_contraction(f, g, spec, params, quad, n) * c)
    return FormalSeries((F, corr), 1)
