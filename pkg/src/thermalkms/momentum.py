"""Momentum-space evaluation of connected Wick components with quadratic densities.

With a quadratic interaction every connected component of a Wick matching is
either a *path* ``leg - density - ... - density - leg`` or a *cycle* of
densities.  A contraction between an earlier vertex ``a`` and a later vertex
``b`` contributes

    (2 pi)^-3 int d^3k  b_sigma(k) / (2 w)   with   a <- (nu = -sigma w, q = k),
                                                   b <- (nu = +sigma w, q = -k),

and each vertex contributes its Fourier transform at the summed (nu, q).
Values returned here are *bare*: a density ``s`` enters as the kernel s(y)
with two distinct slots; combinatorial weights are applied by the caller.
"""
from __future__ import annotations

import itertools
import math
from typing import Sequence

import numpy as np
from scipy.integrate import quad_vec

from .errors import CapacityError, DomainError, QuadratureError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import GaussianCutoff, SmearingFunction, UnitSpace
from .quadrature import gauss_legendre, integrate
from . import kernels

_TWO_PI3 = (2 * math.pi) ** 3


def _bose(sigma, w, params):
    if params.vacuum:
        return np.ones_like(w) if sigma > 0 else np.zeros_like(w)
    bm = kernels.bose_minus(w, params.beta)
    return 1.0 + bm if sigma > 0 else bm


def _sigma_sets(n_edges: int, params: ThermalParams):
    signs = (1,) if params.vacuum else (1, -1)
    return list(itertools.product(signs, repeat=n_edges))


def _vertex_nus(n_vertices, forward, sigmas, omegas):
    """Frequency arguments at each chain vertex for one mode assignment."""
    nus = [0.0] * n_vertices
    for j, (fw, s, w) in enumerate(zip(forward, sigmas, omegas)):
        early, late = (j, j + 1) if fw else (j + 1, j)
        nus[early] = nus[early] - s * w
        nus[late] = nus[late] + s * w
    return nus


def _spatial_center(space):
    return np.asarray(space.center, dtype=float)


def _require_cocentered(items: Sequence[SmearingFunction]):
    c0 = _spatial_center(items[0].space)
    for f in items[1:]:
        if np.linalg.norm(_spatial_center(f.space) - c0) > 1e-12:
            raise CapacityError("finite-L graph evaluation needs all spatial profiles on a common center")


def _cutoff(envelope, params, quad, k_start=None):
    return kernels.resolve_kmax(envelope, params, quad, k_start)


# ------------------------------------------------------------------ paths


def path_value(chain: Sequence[SmearingFunction], forward: Sequence[bool],
               params: ThermalParams, quad: QuadratureSpec | None = None) -> KernelValue:
    """Bare value of the path chain[0] - chain[1] - ... - chain[-1].

    ``chain[0]`` and ``chain[-1]`` are legs, the interior entries densities;
    ``forward[j]`` says whether chain[j] stands before chain[j+1] in the
    star product.
    """
    quad = quad or QuadratureSpec()
    if len(forward) != len(chain) - 1 or len(chain) < 2:
        raise DomainError("a path needs at least two vertices and one orientation per edge")
    f, g = chain[0], chain[-1]
    inner = list(chain[1:-1])
    if not inner:
        return kernels.smeared_two_point(f, g, 0, params, quad) if forward[0] else \
            kernels.smeared_two_point(g, f, 0, params, quad)
    if all(d.is_unit_space for d in inner):
        return _unit_path(chain, forward, params, quad)
    if any(d.is_unit_space for d in inner):
        raise CapacityError("mixed unit and finite spatial profiles in one path")
    if len(inner) == 1 and isinstance(inner[0].space, GaussianCutoff):
        return _finite_path1(chain, forward, params, quad)
    raise CapacityError("finite-L paths through more than one density are out of scope")


def _unit_path(chain, forward, params, quad):
    f, g = chain[0], chain[-1]
    sf, sg = f.space, g.space
    if isinstance(sf, UnitSpace) or isinstance(sg, UnitSpace):
        raise DomainError("legs need localized spatial profiles")
    r = float(np.linalg.norm(_spatial_center(sf) - _spatial_center(sg)))
    n_edges = len(forward)
    sigmas = _sigma_sets(n_edges, params)

    def integrand(k, absval=False):
        k = np.asarray(k, dtype=float)
        w = np.hypot(k, params.m)
        base = kernels._sinc_weight(k, r) * sf.radial_ft(k) * sg.radial_ft(k) / (2 * math.pi**2)
        total = np.zeros(np.shape(k), dtype=complex)
        for sig in sigmas:
            term = base.astype(complex)
            for s in sig:
                term = term * _bose(s, w, params) / (2 * w)
            nus = _vertex_nus(len(chain), forward, sig, [w] * n_edges)
            for v, nu in zip(chain, nus):
                term = term * v.time_ft(nu)
            total = total + (np.abs(term) if absval else term)
        return total

    kmax = _cutoff(lambda k: integrand(k, True), params, quad, kernels._k_start(f, g, params))
    val, err = integrate(integrand, 0.0, kmax, quad)
    return KernelValue(val, float(err))


def _pair_integral(fn, width, kmax, quad, n_d=96):
    """int_0^kmax int dp1 dp2 over the band |p1 - p2| <= 8 width.

    ``fn(p1, p2)`` must already contain the angular kernel.  The band integral
    uses mean/difference coordinates with Gauss-Legendre in the difference;
    the rule is doubled once and the change enters the error estimate.
    """
    half = 8.0 * width

    def run(n):
        x, wts = gauss_legendre(n)

        def outer(P):
            D = min(2.0 * P, half)
            if D <= 0:
                return np.zeros(2)
            d = D * x
            v = fn(P + 0.5 * d, P - 0.5 * d)
            s = D * np.dot(wts, v)
            return np.array([s.real, s.imag])

        res, err, info = quad_vec(outer, 0.0, kmax, epsabs=quad.abs_tol, epsrel=quad.rel_tol,
                                  norm="max", limit=quad.max_subdivisions, full_output=True)
        if not info.success:
            raise QuadratureError(f"band integral stopped at err {err:.3g}")
        return complex(res[0], res[1]), float(err)

    v1, e1 = run(n_d)
    v2, e2 = run(2 * n_d)
    return KernelValue(v2, e2 + abs(v2 - v1))


def _angular_kernel(p1, p2, c):
    """int dOmega1 dOmega2 exp(-c |k1 + k2|^2) / (8 pi^2)."""
    x = 4 * c * np.asarray(p1) * np.asarray(p2)
    safe = np.where(x > 1e-12, x, 1.0)
    ratio = np.where(x > 1e-12, -np.expm1(-safe) / safe, 1.0 - 0.5 * x)
    return 2 * np.exp(-c * (p1 - p2) ** 2) * ratio


def _finite_path1(chain, forward, params, quad):
    f, d, g = chain
    _require_cocentered(chain)
    L = d.space.scale
    c = 0.5 * L * L
    sigmas = _sigma_sets(2, params)
    pref = (2 * math.pi * L * L) ** 1.5 * 8 * math.pi**2 / _TWO_PI3**2

    def fn(p1, p2, absval=False):
        w1, w2 = np.hypot(p1, params.m), np.hypot(p2, params.m)
        base = pref * p1**2 * p2**2 * f.space.radial_ft(p1) * g.space.radial_ft(p2) \
            * _angular_kernel(p1, p2, c) / (4 * w1 * w2)
        total = np.zeros(np.shape(p1), dtype=complex)
        for s1, s2 in sigmas:
            nus = _vertex_nus(3, forward, (s1, s2), (w1, w2))
            term = base * _bose(s1, w1, params) * _bose(s2, w2, params) \
                * f.time_ft(nus[0]) * d.time_ft(nus[1]) * g.time_ft(nus[2])
            total = total + (np.abs(term) if absval else term)
        return total

    kmax = _cutoff(lambda k: fn(k, k, True), params, quad, kernels._k_start(f, g, params))
    return _pair_integral(fn, 1.0 / L, kmax, quad)


# ------------------------------------------------------------------ cycles


def bubble_value(d1: SmearingFunction, d2: SmearingFunction, params: ThermalParams,
                 quad: QuadratureSpec | None = None, weight=None) -> KernelValue:
    """Bare double contraction int s1(x) s2(y) w2(x, y)^2 with d1 before d2.

    ``weight(nu)``, if given, multiplies the integrand at total frequency
    transfer ``nu``; it encodes integrals over relative (complex) shifts.
    """
    quad = quad or QuadratureSpec()
    if d1.is_unit_space or d2.is_unit_space:
        raise DomainError("a density cycle with unit spatial profile diverges with the volume")
    if not (isinstance(d1.space, GaussianCutoff) and isinstance(d2.space, GaussianCutoff)):
        raise CapacityError("density cycles are evaluated for Gaussian cutoffs only")
    _require_cocentered([d1, d2])
    La, Lb = d1.space.scale, d2.space.scale
    c = 0.5 * (La * La + Lb * Lb)
    pref = (2 * math.pi * La * La) ** 1.5 * (2 * math.pi * Lb * Lb) ** 1.5 * 8 * math.pi**2 / _TWO_PI3**2
    sigmas = _sigma_sets(2, params)

    def fn(p1, p2, absval=False):
        w1, w2 = np.hypot(p1, params.m), np.hypot(p2, params.m)
        base = pref * p1**2 * p2**2 * _angular_kernel(p1, p2, c) / (4 * w1 * w2)
        total = np.zeros(np.shape(p1), dtype=complex)
        for s1, s2 in sigmas:
            nu = s1 * w1 + s2 * w2
            term = base * _bose(s1, w1, params) * _bose(s2, w2, params) \
                * d1.time_ft(-nu) * d2.time_ft(nu)
            if weight is not None:
                term = term * weight(nu)
            total = total + (np.abs(term) if absval else term)
        return total

    widths = [w for w in (d1.time.decay_width, d2.time.decay_width) if w and math.isfinite(w)]
    k_start = max(40.0 * params.m, 12.0 / min(widths)) if widths else None
    kmax = _cutoff(lambda k: fn(k, k, True), params, quad, k_start)
    return _pair_integral(fn, 1.0 / math.sqrt(2 * c), kmax, quad)
