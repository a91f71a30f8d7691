"""Adiabatic-limit kernels: the clustering defect w and the steady-state two-point defect.

In the adiabatic limit the ergodic mean of the first-order clustering defect
keeps the y0-independent product of a positive- and a negative-frequency
mode, giving

    w(x1, x2) = (2 pi)^-3 int d^3k  b_+ b_- / (2 w^2)  cos(w (t1 - t2)) e^{ik(x1 - x2)}.

The steady state adds ``beta * w`` to the free two-point function; its
continuation defect ``w(x1, x2 + i beta) - w(x2, x1)`` has the kernel

    beta / (4 w^2) [cos(w dt) + i sin(w dt) coth(beta w / 2)],

evaluated below through ``expm1`` so that no ``cosh - 1`` denominator appears.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import SmearingFunction
from .kernels import (_k_start, _radial_prefactor, _radial_space, _run, _sinc_weight,
                      bose_factors, leg_time_split, separation)


def w_mode_weight(k, params: ThermalParams):
    """b_+ b_- / (2 w^2)."""
    bp, bm = bose_factors(k, params)
    w = np.hypot(k, params.m)
    return bp * bm / (2 * w * w)


def w_mode_weight_cosh(k, params: ThermalParams):
    """The same weight written as 1 / (4 w^2 (cosh(beta w) - 1))."""
    w = np.hypot(k, params.m)
    return 1.0 / (4 * w * w * (np.cosh(params.beta * w) - 1.0))


def _require_thermal(params: ThermalParams):
    if params.vacuum:
        raise DomainError("the adiabatic defect kernels need a finite temperature")


def _paired(f: SmearingFunction, g: SmearingFunction, weight_pm, weight_mp, params, quad):
    """int k^2 sinc(kr) s_f s_g [weight_pm T_f(w) T_g(-w) + weight_mp T_f(-w) T_g(w)] / (2 pi^2)."""
    quad = quad or QuadratureSpec()
    tf, Rf = leg_time_split(f)
    tg, Rg = leg_time_split(g)
    sf, sg = _radial_space(f), _radial_space(g)
    r = separation(f, g)
    pref = _radial_prefactor()

    def spatial(k):
        return pref * _sinc_weight(k, r) * sf.radial_ft(k) * sg.radial_ft(k)

    def amp_pm(k):
        w = np.hypot(k, params.m)
        return spatial(k) * weight_pm(k) * Rf(w) * Rg(-w)

    def amp_mp(k):
        w = np.hypot(k, params.m)
        return spatial(k) * weight_mp(k) * Rf(-w) * Rg(w)

    return _run([(amp_pm, tf - tg), (amp_mp, tg - tf)], params, quad, k_start=_k_start(f, g, params))


def adiabatic_failure_w(f: SmearingFunction, g: SmearingFunction, params: ThermalParams,
                        quad: QuadratureSpec | None = None) -> KernelValue:
    """Smeared w(f, g): the large-T ergodic mean of the order-lambda clustering defect."""
    _require_thermal(params)
    half = lambda k: 0.5 * w_mode_weight(k, params)
    return _paired(f, g, half, half, params, quad)


def ness_two_point(f: SmearingFunction, g: SmearingFunction, params: ThermalParams,
                   quad: QuadratureSpec | None = None, shift: complex = 0j) -> KernelValue:
    """beta int d^3k cos(w dt) / (4 w^2 (cosh(beta w) - 1)) smeared, with g moved by ``shift``.

    A complex ``shift`` continues the cosine kernel analytically.
    """
    _require_thermal(params)
    g = g.translate(shift) if shift else g
    half = lambda k: 0.5 * params.beta * w_mode_weight_cosh(k, params)
    return _paired(f, g, half, half, params, quad)


def ness_kms_violation(f: SmearingFunction, g: SmearingFunction, params: ThermalParams,
                       quad: QuadratureSpec | None = None) -> KernelValue:
    """Smeared continuation defect beta int d^3k [cos + i sin coth(beta w/2)] / (4 w^2).

    With c = coth(beta w / 2) the kernel pairs T_f(w) T_g(-w) with (1 + c)/2
    and T_f(-w) T_g(w) with (1 - c)/2; both are written through expm1 so that
    nothing cancels at large beta w.
    """
    _require_thermal(params)
    beta = params.beta

    def pm(k):
        w = np.hypot(k, params.m)
        return beta / (4 * w * w) / (-np.expm1(-beta * w))

    def mp(k):
        w = np.hypot(k, params.m)
        return -beta / (4 * w * w) / np.expm1(beta * w)

    return _paired(f, g, pm, mp, params, quad)


def ness_kms_violation_direct(f: SmearingFunction, g: SmearingFunction, params: ThermalParams,
                              quad: QuadratureSpec | None = None) -> KernelValue:
    """The same defect from the continued cosine kernel: w+(f, g_{i beta}) - w+(g, f)."""
    return ness_two_point(f, g, params, quad, shift=1j * params.beta) - ness_two_point(g, f, params, quad)
