"""Oscillatory 1D quadrature, tensor Gauss grids and ordered-simplex rules.

Two 1D strategies are offered behind :func:`integrate_components`:

``adaptive``
    Globally adaptive Gauss-Kronrod subdivision (scipy ``quad_vec``) on the
    summed integrand, with panel breakpoints placed every 2*pi of phase.
``filon``
    Composite Filon-Simpson rule.  Each component is ``g(x) * exp(i*phi(x))``
    with smooth amplitude ``g``; on every panel the phase is replaced by its
    chord and the (small) curvature remainder is folded into the amplitude.
    The number of sub-intervals is doubled until two successive results agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad_vec

from .errors import QuadratureError
from .params import QuadratureSpec

Component = tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray] | None]


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]; cached and returned read-only."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_panels(a: float, b: float, n_panels: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes/weights on [a, b] with equal panels."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _total(components: Sequence[Component]):
    def f(x):
        out = np.zeros(np.shape(x), dtype=complex)
        for g, phi in components:
            v = g(x)
            if phi is not None:
                v = v * np.exp(1j * phi(x))
            out = out + v
        return out

    return f


def _phase_breakpoints(components, a, b, n_probe=257):
    """Breakpoints spaced by about 2*pi of the fastest component phase."""
    xs = np.linspace(a, b, n_probe)
    total = np.zeros_like(xs)
    for _, phi in components:
        if phi is None:
            continue
        p = np.asarray(phi(xs), dtype=float)
        total = np.maximum(total, np.abs(np.concatenate([[0.0], np.cumsum(np.abs(np.diff(p)))])))
    n_breaks = int(total[-1] // (2 * math.pi))
    if n_breaks <= 0:
        return []
    levels = np.linspace(0, total[-1], n_breaks + 2)[1:-1]
    return list(np.interp(levels, total, xs))


def _adaptive(components, a, b, spec: QuadratureSpec):
    f = _total(components)

    def stacked(x):
        v = f(np.asarray(x))
        return np.array([v.real, v.imag])

    points = _phase_breakpoints(components, a, b)
    limit = max(spec.max_subdivisions, 4 * (len(points) + 1))
    res, err, info = quad_vec(
        stacked, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol, norm="max",
        points=points or None, limit=limit, full_output=True,
    )
    if not info.success:
        raise QuadratureError(
            f"adaptive quadrature on [{a:g}, {b:g}] stopped at err {err:.3g} ({info.status})"
        )
    return complex(res[0], res[1]), float(err)


def _filon_moments(theta: np.ndarray):
    """Exact moments of 1, u, u^2 against exp(i*theta*u) on [-1, 1]."""
    theta = np.asarray(theta, dtype=float)
    small = np.abs(theta) < 0.1
    t = np.where(small, 0.5, theta)
    s, c = np.sin(t), np.cos(t)
    m0 = 2 * s / t
    m1 = 2j * (s / t**2 - c / t)
    m2 = 2 * ((t**2 - 2) * s + 2 * t * c) / t**3
    q = theta
    m0s = 2 * (1 - q**2 / 6 + q**4 / 120 - q**6 / 5040 + q**8 / 362880)
    m1s = 2j * (q / 3 - q**3 / 30 + q**5 / 840 - q**7 / 45360)
    m2s = 2 * (1 / 3 - q**2 / 10 + q**4 / 168 - q**6 / 6480 + q**8 / 443520)
    return np.where(small, m0s, m0), np.where(small, m1s, m1), np.where(small, m2s, m2)


def _filon_panel(g, phi, a, b, n_sub):
    """Composite Filon-Simpson on [a, b] with ``n_sub`` quadratic cells."""
    if phi is None:
        slope, offset = 0.0, 0.0
        amp = g
    else:
        pa, pb = float(phi(np.array([a]))[0]), float(phi(np.array([b]))[0])
        slope = (pb - pa) / (b - a)
        offset = pa - slope * a

        def amp(x):
            return g(x) * np.exp(1j * (phi(x) - offset - slope * x))

    edges = np.linspace(a, b, n_sub + 1)
    h = 0.5 * (edges[1] - edges[0])
    mids = edges[:-1] + h
    x = np.empty(2 * n_sub + 1)
    x[0::2] = edges
    x[1::2] = mids
    y = amp(x)
    m0, m1, m2 = _filon_moments(np.array(slope * h))
    w0, w1, w2 = (m2 - m1) / 2, m0 - m2, (m2 + m1) / 2
    cell = w0 * y[0:-1:2] + w1 * y[1::2] + w2 * y[2::2]
    return np.exp(1j * offset) * h * np.sum(cell * np.exp(1j * slope * mids))


def _filon(components, a, b, spec: QuadratureSpec, max_doublings: int = 14):
    total, err_total = 0j, 0.0
    for g, phi in components:
        # panel so that the chord remainder of the phase stays below ~0.5 rad
        if phi is None:
            n_panels = 1
        else:
            xs = np.linspace(a, b, 513)
            p = np.asarray(phi(xs), dtype=float)
            curv = np.max(np.abs(np.diff(p, 2))) / (xs[1] - xs[0]) ** 2 if len(xs) > 2 else 0.0
            width = math.sqrt(4.0 / curv) if curv > 0 else (b - a)
            n_panels = max(1, int(math.ceil((b - a) / width)))
        edges = np.linspace(a, b, n_panels + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            n_sub = 8
            prev = _filon_panel(g, phi, lo, hi, n_sub)
            for _ in range(max_doublings):
                n_sub *= 2
                cur = _filon_panel(g, phi, lo, hi, n_sub)
                diff = abs(cur - prev)
                prev = cur
                tol = max(spec.abs_tol / n_panels, spec.rel_tol * abs(cur))
                if diff < tol:
                    break
            else:
                raise QuadratureError(f"Filon rule failed to converge on [{lo:g}, {hi:g}]")
            total += prev
            err_total += diff
    return total, err_total


def integrate_components(components: Sequence[Component], a: float, b: float,
                         spec: QuadratureSpec) -> tuple[complex, float]:
    """Integrate ``sum_j g_j(x) exp(i*phi_j(x))`` over [a, b].

    ``phi_j`` may be ``None`` for a non-oscillatory component.  Returns the
    value and an error estimate.
    """
    if b <= a:
        return 0j, 0.0
    if spec.oscillatory_method == "filon":
        return _filon(components, a, b, spec)
    return _adaptive(components, a, b, spec)


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              spec: QuadratureSpec) -> tuple[complex, float]:
    """Plain (non-decomposed) integrand; always uses adaptive subdivision."""
    return _adaptive([(f, None)], a, b, spec)


def grid_2d(f: Callable[[np.ndarray, np.ndarray], np.ndarray],
            x_range: tuple[float, float], y_range: tuple[float, float],
            nx: int, ny: int, order: int = 16) -> complex:
    """Tensor composite Gauss-Legendre rule; ``f`` receives broadcastable grids."""
    xn, xw = gauss_panels(*x_range, nx, order)
    yn, yw = gauss_panels(*y_range, ny, order)
    vals = f(xn[:, None], yn[None, :])
    return complex(np.einsum("i,ij,j->", xw, vals, yw))


def converged_grid_2d(f, x_range, y_range, nx: int, ny: int, spec: QuadratureSpec,
                      max_doublings: int = 6) -> tuple[complex, float]:
    """Double panel counts on both axes until two results agree to tolerance."""
    prev = grid_2d(f, x_range, y_range, nx, ny)
    for _ in range(max_doublings):
        nx, ny = 2 * nx, 2 * ny
        cur = grid_2d(f, x_range, y_range, nx, ny)
        diff = abs(cur - prev)
        if diff <= max(spec.abs_tol, spec.rel_tol * abs(cur)):
            return cur, diff
        prev = cur
    raise QuadratureError(f"2D grid failed to converge (last change {diff:.3g})")


@dataclass(frozen=True)
class SimplexQuadrature:
    """Iterated Gauss rule on the ordered simplex {0 <= t_1 <= ... <= t_n <= T}.

    Cube coordinates are collapsed (t_n = T x_n, t_{j} = t_{j+1} x_j), so the
    rule is exact on constants and converges on smooth integrands.
    """

    dimension: int
    nodes_per_axis: int = 16

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("simplex dimension must be >= 1")
        if self.nodes_per_axis < 1:
            raise ValueError("nodes_per_axis must be >= 1")

    def rule(self, extent: complex = 1.0) -> tuple[np.ndarray, np.ndarray]:
        """Points of shape (N, n) with increasing coordinates, and weights.

        ``extent`` may be complex (e.g. ``1j*beta``): the simplex is then the
        image of the real one under t -> extent * t, and weights carry
        ``extent**n``.
        """
        n = self.dimension
        x, w = gauss_legendre(self.nodes_per_axis)
        x = 0.5 * (x + 1.0)
        w = 0.5 * w
        grids = np.meshgrid(*([x] * n), indexing="ij")
        wgrids = np.meshgrid(*([w] * n), indexing="ij")
        cube = np.stack([g.ravel() for g in grids], axis=1)
        weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        pts = np.empty_like(cube)
        pts[:, n - 1] = cube[:, n - 1]
        for j in range(n - 2, -1, -1):
            pts[:, j] = pts[:, j + 1] * cube[:, j]
            weights = weights * pts[:, j + 1]
        return pts * extent, weights * extent**n

    def integrate(self, f: Callable[[np.ndarray], complex], extent: complex = 1.0) -> complex:
        pts, wts = self.rule(extent)
        return complex(sum(w * f(p) for p, w in zip(pts, wts)))
