import math

import pytest
from hypothesis import given, strategies as st

from thermalkms import (ConfigurationError, DomainError, KernelValue, KMSError, QuadratureSpec,
                        ThermalParams)

finite = st.floats(-1e3, 1e3, allow_nan=False)
cplx = st.builds(complex, finite, finite)
errs = st.floats(0, 1e-3)


@pytest.mark.parametrize("m,beta", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, math.inf), (math.nan, 1.0)])
def test_thermal_params_rejects_bad_values(m, beta):
    with pytest.raises(DomainError):
        ThermalParams(m, beta)


def test_vacuum_state():
    p = ThermalParams.vacuum_state(2.0)
    assert p.vacuum and p.m == 2.0


def test_errors_share_a_root():
    assert issubclass(DomainError, KMSError) and issubclass(ConfigurationError, ValueError)


def test_quadrature_spec_validation():
    with pytest.raises(ConfigurationError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(ConfigurationError):
        QuadratureSpec(oscillatory_method="simpson")
    with pytest.raises(ConfigurationError):
        QuadratureSpec(k_max=-1)
    s = QuadratureSpec(rel_tol=1e-8, abs_tol=1e-12).scaled(10)
    assert s.rel_tol == pytest.approx(1e-7) and s.abs_tol == pytest.approx(1e-11)
    assert math.exp(-QuadratureSpec(eps_cut=1e-6).cut_exponent()) == pytest.approx(1e-6)


@given(cplx, errs, cplx, errs)
def test_kernel_value_arithmetic(a, ea, b, eb):
    x, y = KernelValue(a, ea), KernelValue(b, eb)
    assert (x + y).value == a + b and (x + y).err_estimate == ea + eb
    assert (x - y).value == pytest.approx(a - b)
    assert (x * y).value == pytest.approx(a * b)
    assert (x * y).err_estimate >= 0
    assert (2 * x).err_estimate == pytest.approx(2 * ea)
    assert x.conjugate().value == a.conjugate()
    assert x.as_row() == (a.real, a.imag, ea)


def test_kernel_value_rejects_negative_error():
    with pytest.raises(DomainError):
        KernelValue(1.0, -1e-3)


def test_kernel_value_division():
    q = KernelValue(2.0, 0.1) / KernelValue(4.0, 0.0)
    assert q.value == 0.5 and q.err_estimate == pytest.approx(0.025)
