import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermalkms import QuadratureError, QuadratureSpec
from thermalkms.quadrature import (SimplexQuadrature, converged_grid_2d, gauss_legendre, gauss_panels,
                                   grid_2d, integrate, integrate_components)

SPEC = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13)
METHODS = ["adaptive", "filon"]


def test_gauss_legendre_is_cached_read_only():
    x, w = gauss_legendre(12)
    assert gauss_legendre(12)[0] is x
    assert w.sum() == pytest.approx(2.0)
    with pytest.raises(ValueError):
        x[0] = 0.0


@given(st.floats(-3, 3), st.floats(0.1, 5), st.integers(1, 8))
def test_gauss_panels_integrate_polynomials(a, length, panels):
    x, w = gauss_panels(a, a + length, panels, order=8)
    b = a + length
    assert np.sum(w * x**7) == pytest.approx((b**8 - a**8) / 8, rel=1e-11, abs=1e-11)


@pytest.mark.parametrize("method", METHODS)
@given(omega=st.floats(0.5, 60))
def test_gaussian_fourier_integral(method, omega):
    # int_0^inf exp(-x^2/2) cos(omega x) dx = sqrt(pi/2) exp(-omega^2/2); here on x in [0, 40]
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, oscillatory_method=method)
    comps = [(lambda x: 0.5 * np.exp(-0.5 * x * x), lambda x: omega * x),
             (lambda x: 0.5 * np.exp(-0.5 * x * x), lambda x: -omega * x)]
    val, err = integrate_components(comps, 0.0, 40.0, spec)
    exact = math.sqrt(math.pi / 2) * math.exp(-0.5 * omega * omega)
    assert val.real == pytest.approx(exact, abs=1e-9)
    assert abs(val.imag) < 1e-9 and err >= 0


@pytest.mark.parametrize("method", METHODS)
def test_nonlinear_phase(method):
    # int_0^5 exp(i (x^2 + x)) e^{-x} dx against a dense reference rule
    spec = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-13, oscillatory_method=method)
    val, _ = integrate_components([(lambda x: np.exp(-x), lambda x: x * x + x)], 0.0, 5.0, spec)
    xs, ws = gauss_panels(0.0, 5.0, 400, 16)
    ref = np.sum(ws * np.exp(-xs) * np.exp(1j * (xs * xs + xs)))
    assert val == pytest.approx(ref, abs=1e-9)


def test_empty_interval_and_plain_integrand():
    assert integrate_components([(np.exp, None)], 1.0, 1.0, SPEC) == (0j, 0.0)
    val, _ = integrate(lambda x: x * x, 0.0, 3.0, SPEC)
    assert val == pytest.approx(9.0)


def test_grid_2d_and_convergence_failure():
    val = grid_2d(lambda x, y: x * y * y, (0, 1), (0, 2), 2, 2)
    assert val == pytest.approx(0.5 * 8 / 3)
    v, _ = converged_grid_2d(lambda x, y: np.exp(-x - y), (0, 1), (0, 1), 2, 2, SPEC)
    assert v == pytest.approx((1 - math.exp(-1)) ** 2)
    wild = lambda x, y: np.sign(np.sin(1e4 * x)) + 0 * y
    with pytest.raises(QuadratureError):
        converged_grid_2d(wild, (0, 1), (0, 1), 1, 1, QuadratureSpec(rel_tol=1e-14, abs_tol=1e-15),
                          max_doublings=2)


@given(st.integers(1, 4), st.floats(0.1, 3))
def test_simplex_volume(n, T):
    q = SimplexQuadrature(n, 6)
    _, w = q.rule(T)
    assert w.sum() == pytest.approx(T**n / math.factorial(n), rel=1e-12)


def test_simplex_points_are_ordered_and_complex_extent():
    pts, _ = SimplexQuadrature(3, 5).rule(2.0)
    assert np.all(np.diff(pts, axis=1) >= 0) and pts.max() <= 2.0
    # int over the beta-simplex of exp(u_1): with extent i*beta the result is analytic in beta
    beta = 0.7
    val = SimplexQuadrature(2, 20).integrate(lambda p: np.exp(p[0]), 1j * beta)
    z = 1j * beta
    exact = np.exp(z) - 1 - z  # int_0^z int_0^{u2} e^{u1} = e^z - 1 - z
    assert val == pytest.approx(exact, abs=1e-12)


def test_simplex_rejects_bad_arguments():
    with pytest.raises(ValueError):
        SimplexQuadrature(0)
    with pytest.raises(ValueError):
        SimplexQuadrature(2, 0)
