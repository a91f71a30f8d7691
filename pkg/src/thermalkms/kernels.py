"""Free thermal and vacuum two-point kernels of the massive scalar field.

All kernels use the mode convention

    w2(x, y) = (2 pi)^-3 int d^3k [b+ e^{-i w (t_x - t_y)} + b- e^{+i w (t_x - t_y)}] / (2 w)
               * e^{i k.(x - y)},

with ``w = sqrt(k^2 + m^2)``, ``b+ = 1/(1 - e^{-beta w})`` and ``b- = e^{-beta w} b+``.
With it, ``w2(f, g translated by t + i beta) = w2(g translated by t, f)``.
Rotational symmetry reduces every 3D momentum integral to a radial one,
``int d^3k F(|k|) e^{ik.r} = 4 pi int dk k^2 sinc(k r) F(k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import kv, wofz

from .errors import ConfigurationError, DomainError, LightConeError, StripError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import GaussianTime, SmearingFunction, UnitSpace
from .quadrature import integrate_components

LIGHT_CONE_MARGIN = 1e-3
_STRIP_SLACK = 1e-12


def dispersion(k, params: ThermalParams):
    """sqrt(k^2 + m^2) for radial momenta k >= 0 (scalar or array)."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(k_arr < 0):
        raise DomainError("radial momentum must be nonnegative")
    out = np.hypot(k_arr, params.m)
    return float(out) if np.ndim(out) == 0 else out


def bose_minus(w, beta: float):
    """1 / (e^{beta w} - 1), written so that large beta w underflows instead of overflowing."""
    x = beta * np.asarray(w, dtype=float)
    return np.exp(-x) / -np.expm1(-x)


def bose_factors(k, params: ThermalParams):
    """(b_plus, b_minus); exactly (1, 0) in the vacuum."""
    w = np.asarray(dispersion(k, params))
    if params.vacuum:
        one = np.ones_like(w)
        zero = np.zeros_like(w)
        return (float(one), float(zero)) if w.ndim == 0 else (one, zero)
    bm = bose_minus(w, params.beta)
    bp = 1.0 + bm
    return (float(bp), float(bm)) if w.ndim == 0 else (bp, bm)


def _sinc_weight(k, r):
    """k^2 sin(k r)/(k r), the angular-averaged radial measure."""
    if r == 0:
        return k * k
    return k * np.sin(k * r) / r


def _radial_prefactor():
    return 1.0 / (2.0 * math.pi**2)


# ------------------------------------------------------------------ cutoffs


def resolve_kmax(envelope, params: ThermalParams, quad: QuadratureSpec,
                 k_start: float | None = None) -> float:
    """Radial cutoff where the phase-free integrand envelope stays below eps_cut*peak."""
    if quad.k_max is not None:
        return quad.k_max
    K = k_start or 40.0 * params.m
    for _ in range(12):
        ks = np.linspace(0.0, K, 4097)
        env = np.abs(np.asarray(envelope(ks), dtype=complex))
        peak = float(np.max(env))
        if peak == 0.0:
            return K
        tail = np.maximum.accumulate(env[::-1])[::-1]
        below = np.nonzero(tail < quad.eps_cut * peak)[0]
        if below.size and below[0] < len(ks) - 1:
            return float(max(ks[below[0]], 1e-3 * params.m))
        K *= 2.0
    raise ConfigurationError("integrand is not suppressed at large momentum; no finite cutoff")


def _mode_components(amps_and_coefs, params):
    """Turn [(A(k), c)] for A(k) exp(i c w(k)), c complex, into Filon components."""
    comps = []
    for amp, c in amps_and_coefs:
        c = complex(c)

        def g(k, amp=amp, c=c):
            w = np.hypot(k, params.m)
            return amp(k) * np.exp(-c.imag * w)

        if c.real == 0.0:
            comps.append((g, None))
        else:
            comps.append((g, lambda k, cr=c.real: cr * np.hypot(k, params.m)))
    return comps


def _run(amps_and_coefs, params, quad, k_start=None) -> KernelValue:
    comps = _mode_components(amps_and_coefs, params)

    def envelope(k):
        return sum(np.abs(g(k)) for g, _ in comps)

    kmax = resolve_kmax(envelope, params, quad, k_start)
    val, err = integrate_components(comps, 0.0, kmax, quad)
    # crude bound on the discarded tail
    tail = quad.eps_cut * float(np.max(envelope(np.linspace(0.0, kmax, 257)))) * kmax * 1e-2
    return KernelValue(val, float(err) + tail)


# --------------------------------------------------------------- pointwise


def _check_cone(dt: complex, r: float, m: float):
    if abs(dt * dt - r * r) < LIGHT_CONE_MARGIN / (m * m):
        raise LightConeError(
            f"(dt={dt}, r={r}) lies within the light-cone exclusion margin of the singular support"
        )


def _invariant_distance(dt: complex, r: float) -> complex:
    """sqrt(r^2 - dt^2) on the branch continued from Im dt < 0."""
    z = complex(r * r - dt * dt)
    if z.imag == 0.0 and z.real < 0.0:
        sign = 1.0 if dt.real >= 0 else -1.0
        return 1j * sign * math.sqrt(-z.real)
    return complex(np.sqrt(z))


def omega2_vacuum(dt: complex, r: float, m: float) -> KernelValue:
    """Massive vacuum two-point function m K_1(m rho) / (4 pi^2 rho), rho = sqrt(r^2 - dt^2).

    ``dt = t_x - t_y``; real arguments are understood as boundary values from
    Im dt < 0.  Exact up to the Bessel evaluation (err_estimate from double rounding).
    """
    if not m > 0:
        raise DomainError("mass must be positive")
    dt = complex(dt)
    r = abs(float(r))
    _check_cone(dt, r, m)
    rho = _invariant_distance(dt, r)
    val = m * kv(1, m * rho) / (4 * math.pi**2 * rho)
    return KernelValue(complex(val), 1e-14 * abs(val))


def thermal_remainder(dt: complex, r: float, params: ThermalParams,
                      quad: QuadratureSpec | None = None) -> KernelValue:
    """w2^beta - w2^vacuum at (dt, r): (1/2pi^2) int dk k^2 sinc(kr) b- cos(w dt) / w."""
    quad = quad or QuadratureSpec()
    dt = complex(dt)
    if params.vacuum:
        return KernelValue(0j, 0.0)
    if abs(dt.imag) >= params.beta:
        raise StripError(f"|Im dt| = {abs(dt.imag)} must be < beta = {params.beta}")
    r = abs(float(r))
    pref = _radial_prefactor()

    def amp(k):
        w = np.hypot(k, params.m)
        return 0.5 * pref * _sinc_weight(k, r) * bose_minus(w, params.beta) / w

    return _run([(amp, dt), (amp, -dt)], params, quad)


def omega2_modes(dt: complex, r: float, params: ThermalParams,
                 quad: QuadratureSpec | None = None) -> KernelValue:
    """Direct mode-sum evaluation; needs -beta < Im dt < 0 strictly."""
    quad = quad or QuadratureSpec()
    dt = complex(dt)
    upper = math.inf if params.vacuum else params.beta
    if not (-upper < dt.imag < 0):
        raise StripError("direct mode integral needs -beta < Im(dt) < 0")
    r = abs(float(r))
    pref = _radial_prefactor()

    def amp_plus(k):
        w = np.hypot(k, params.m)
        bp, _ = bose_factors(k, params)
        return pref * _sinc_weight(k, r) * bp / (2 * w)

    terms = [(amp_plus, -dt)]
    if not params.vacuum:
        def amp_minus(k):
            w = np.hypot(k, params.m)
            return pref * _sinc_weight(k, r) * bose_minus(w, params.beta) / (2 * w)

        terms.append((amp_minus, dt))
    return _run(terms, params, quad)


def omega2_position(dt: complex, r: float, params: ThermalParams,
                    quad: QuadratureSpec | None = None, method: str = "split") -> KernelValue:
    """Thermal two-point function at complex time separation ``dt`` and distance ``r``.

    ``method="split"`` adds the closed-form vacuum part to the Bose-suppressed
    thermal remainder (valid for |Im dt| < beta off the cone);
    ``method="modes"`` integrates the full mode sum (needs -beta < Im dt < 0).
    """
    quad = quad or QuadratureSpec()
    dt = complex(dt)
    r = abs(float(r))
    if not params.vacuum and abs(dt.imag) >= params.beta:
        raise StripError(f"Im(dt) = {dt.imag} outside (-beta, beta)")
    _check_cone(dt, r, params.m)
    if method == "modes":
        return omega2_modes(dt, r, params, quad)
    if method != "split":
        raise ConfigurationError(f"unknown method {method!r}")
    return omega2_vacuum(dt, r, params.m) + thermal_remainder(dt, r, params, quad)


# ----------------------------------------------------------------- smeared


def _radial_space(f: SmearingFunction):
    if isinstance(f.space, UnitSpace):
        raise ConfigurationError(
            "unit spatial profile cannot enter a pointwise Fourier product; use a collapsed evaluation"
        )
    return f.space


def separation(f: SmearingFunction, g: SmearingFunction) -> float:
    return float(np.linalg.norm(np.subtract(_radial_space(f).center, _radial_space(g).center)))


def leg_time_split(f: SmearingFunction):
    """(tau, R) with T_f(nu) = exp(i nu tau) R(nu); tau carries center and shift."""
    tau = complex(f.time_center)
    base = f.time_center - f.shift

    def R(nu, f=f, base=base):
        nu = np.asarray(nu)
        return f.time.ft(nu) * np.exp(-1j * nu * base)

    return tau, R


def check_strip(rel_shift_imag: float, params: ThermalParams, what: str = "shift"):
    upper = math.inf if params.vacuum else params.beta
    if not (-_STRIP_SLACK <= rel_shift_imag <= upper + _STRIP_SLACK):
        raise StripError(f"Im({what}) = {rel_shift_imag:g} outside [0, beta={params.beta:g}]")


def smeared_two_point(f: SmearingFunction, g: SmearingFunction, shift: complex,
                      params: ThermalParams, quad: QuadratureSpec | None = None) -> KernelValue:
    """<w2^beta, f (x) g_shift> with g translated in time by the complex ``shift``.

    The relative imaginary shift (g minus f, including their own shifts) must
    lie in [0, beta].
    """
    quad = quad or QuadratureSpec()
    g = g.translate(shift) if shift else g
    tf, Rf = leg_time_split(f)
    tg, Rg = leg_time_split(g)
    check_strip((tg - tf).imag, params)
    sf, sg = _radial_space(f), _radial_space(g)
    r = separation(f, g)
    pref = _radial_prefactor()

    def spatial(k):
        return pref * _sinc_weight(k, r) * sf.radial_ft(k) * sg.radial_ft(k)

    def amp_plus(k):
        w = np.hypot(k, params.m)
        bp, _ = bose_factors(k, params)
        return spatial(k) * bp * Rf(-w) * Rg(w) / (2 * w)

    terms = [(amp_plus, tg - tf)]
    if not params.vacuum:
        def amp_minus(k):
            w = np.hypot(k, params.m)
            return spatial(k) * Rf(w) * Rg(-w) * bose_minus(w, params.beta) / (2 * w)

        terms.append((amp_minus, tf - tg))
    return _run(terms, params, quad, k_start=_k_start(f, g, params))


def _k_start(f, g, params):
    widths = [w for w in (getattr(f.space, "decay_width", 0), getattr(g.space, "decay_width", 0),
                          getattr(f.time, "decay_width", 0), getattr(g.time, "decay_width", 0)) if w]
    if not widths:
        return None
    return max(40.0 * params.m, 12.0 / max(widths))


def causal_propagator(f: SmearingFunction, g: SmearingFunction, params: ThermalParams,
                      quad: QuadratureSpec | None = None) -> KernelValue:
    """Delta(f, g) = -i [w2(f, g) - w2(g, f)]; independent of beta.

    Evaluated from the combined mode integrand, in which the Bose factors
    enter only through b+ - b- = 1.
    """
    quad = quad or QuadratureSpec()
    tf, Rf = leg_time_split(f)
    tg, Rg = leg_time_split(g)
    sf, sg = _radial_space(f), _radial_space(g)
    r = separation(f, g)
    pref = _radial_prefactor()

    def amp_a(k):
        w = np.hypot(k, params.m)
        return -1j * pref * _sinc_weight(k, r) * sf.radial_ft(k) * sg.radial_ft(k) * Rf(-w) * Rg(w) / (2 * w)

    def amp_b(k):
        w = np.hypot(k, params.m)
        return 1j * pref * _sinc_weight(k, r) * sf.radial_ft(k) * sg.radial_ft(k) * Rf(w) * Rg(-w) / (2 * w)

    return _run([(amp_a, tg - tf), (amp_b, tf - tg)], params, quad, k_start=_k_start(f, g, params))


def _forward_fourier_of_gaussian(omega, mu, s):
    """int_0^inf rho(tau) e^{i omega tau} for a Gaussian density (mean mu, std s)."""
    omega = np.asarray(omega, dtype=float)
    if s == 0:
        return np.where(mu > 0, np.exp(1j * omega * mu), 0.5 * (mu == 0) * np.exp(0j * omega))
    root2s = math.sqrt(2.0) * s
    pre = 0.5 * math.exp(-mu * mu / (2 * s * s))
    if mu <= 0:
        return pre * wofz((omega * s * s - 1j * mu) / root2s)
    full = np.exp(1j * omega * mu - 0.5 * (omega * s) ** 2)
    back = pre * wofz((-omega * s * s + 1j * mu) / root2s)
    return full - back


def retarded_propagator(f: SmearingFunction, g: SmearingFunction, params: ThermalParams,
                        quad: QuadratureSpec | None = None) -> KernelValue:
    """Delta_R(f, g) = int f(x) g(y) theta(t_x - t_y) Delta(x, y).

    Supported where x lies to the future of y, so that
    Delta_R(f, g) - Delta_R(g, f) = Delta(f, g).  Needs Gaussian time profiles
    (width zero allowed for one of them) and real shifts.
    """
    quad = quad or QuadratureSpec()
    for h in (f, g):
        if not isinstance(h.time, GaussianTime):
            raise ConfigurationError("retarded propagator needs Gaussian time profiles")
        if h.shift.imag != 0:
            raise DomainError("retarded propagator needs real time shifts")
    mu = (f.time.center + f.shift.real) - (g.time.center + g.shift.real)
    s = math.hypot(f.time.width, g.time.width)
    sf, sg = _radial_space(f), _radial_space(g)
    r = separation(f, g)
    pref = _radial_prefactor()

    def amp(k):
        w = np.hypot(k, params.m)
        J = np.imag(_forward_fourier_of_gaussian(w, mu, s))
        return -pref * _sinc_weight(k, r) * sf.radial_ft(k) * sg.radial_ft(k) * J / w

    return _run([(amp, 0.0)], params, quad, k_start=_k_start(f, g, params))


# --------------------------------------------------------------- envelopes


@dataclass(frozen=True)
class DecayReport:
    times: tuple[float, ...]
    values: tuple[KernelValue, ...]
    envelope_sup: float
    slope: float
    intercept: float

    @property
    def scaled(self) -> np.ndarray:
        t = np.asarray(self.times)
        return t**1.5 * np.array([abs(v) for v in self.values])


def loglog_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares (slope, intercept, rms residual) of log|y| against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.abs(np.asarray(y, dtype=complex)))
    A = np.vstack([lx, np.ones_like(lx)]).T
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - A @ coef
    return float(coef[0]), float(coef[1]), float(np.sqrt(np.mean(resid**2)))


def decay_envelope(dt_grid: Sequence[float], r: float, params: ThermalParams,
                   quad: QuadratureSpec | None = None) -> DecayReport:
    """sup_t t^{3/2} |w2^beta(t, r)| and the log-log slope of |w2^beta| over ``dt_grid``."""
    quad = quad or QuadratureSpec()
    times = tuple(float(t) for t in dt_grid)
    if any(t * params.m <= 1 for t in times):
        raise DomainError("decay grid must satisfy t > 1/m")
    values = tuple(omega2_position(t, r, params, quad) for t in times)
    mags = [abs(v) for v in values]
    slope, intercept, _ = loglog_fit(times, mags)
    sup = max(t**1.5 * a for t, a in zip(times, mags))
    return DecayReport(times, values, sup, slope, intercept)
