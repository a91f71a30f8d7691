import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermalkms import DomainError, QuadratureSpec, ThermalParams
from thermalkms.ness import (adiabatic_failure_w, ness_kms_violation, ness_kms_violation_direct,
                             ness_two_point, w_mode_weight, w_mode_weight_cosh)
from thermalkms.profiles import gaussian_packet

Q = QuadratureSpec(rel_tol=1e-10, abs_tol=1e-15)
packets = st.builds(gaussian_packet, st.floats(-2, 2), st.tuples(st.floats(-1, 1), st.just(0.0), st.just(0.0)),
                    st.floats(0.3, 1.0), st.floats(0.5, 1.5))


@given(st.floats(0, 30), st.floats(0.3, 5))
def test_mode_weight_forms_agree(k, beta):
    p = ThermalParams(1.0, beta)
    assert w_mode_weight(k, p) == pytest.approx(w_mode_weight_cosh(k, p), rel=1e-10)


@settings(max_examples=8)
@given(packets, packets, st.floats(0.5, 3))
def test_ness_is_beta_times_w(f, g, beta):
    p = ThermalParams(1.0, beta)
    w = adiabatic_failure_w(f, g, p, Q)
    n = ness_two_point(f, g, p, Q)
    assert n.value == pytest.approx(beta * w.value, rel=1e-8, abs=10 * (n.err_estimate + beta * w.err_estimate))
    # w is a symmetric real kernel
    assert w.value == pytest.approx(adiabatic_failure_w(g, f, p, Q).value, rel=1e-8, abs=1e-15)
    assert abs(w.value.imag) <= 1e-12 * abs(w.value) + 1e-16


@settings(max_examples=8)
@given(packets, packets, st.floats(0.5, 3))
def test_violation_kernel_matches_direct_continuation(f, g, beta):
    p = ThermalParams(1.0, beta)
    a = ness_kms_violation(f, g, p, Q)
    b = ness_kms_violation_direct(f, g, p, Q)
    assert a.value == pytest.approx(b.value, rel=1e-7, abs=1e-12)


def test_violation_is_real_for_equal_time_packets_and_large_otherwise():
    p = ThermalParams(1.0, 1.0)
    f = gaussian_packet(0.0, sigma_t=0.5)
    sym = ness_kms_violation(f, f, p, Q)
    assert abs(sym.value.imag) <= 10 * sym.err_estimate + 1e-14
    off = ness_kms_violation(f, gaussian_packet(1.5, (0.5, 0, 0), 0.5), p, Q)
    assert abs(off.value) > 10 * off.err_estimate
    assert abs(off.value.imag) > 10 * off.err_estimate


def test_diagonal_is_positive_and_vacuum_is_rejected():
    f = gaussian_packet(0.0)
    assert adiabatic_failure_w(f, f, ThermalParams(1.0, 1.0), Q).value.real > 0
    with pytest.raises(DomainError):
        adiabatic_failure_w(f, f, ThermalParams.vacuum_state())
    with pytest.raises(DomainError):
        ness_two_point(f, f, ThermalParams.vacuum_state())


def test_w_vanishes_at_low_temperature():
    f = gaussian_packet(0.0)
    hot = abs(adiabatic_failure_w(f, f, ThermalParams(1.0, 1.0), Q))
    cold = abs(adiabatic_failure_w(f, f, ThermalParams(1.0, 20.0), Q))
    assert cold < 1e-7 * hot
    assert np.isfinite(cold)
