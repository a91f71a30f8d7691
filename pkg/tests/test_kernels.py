import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import kv

from thermalkms import DomainError, LightConeError, QuadratureSpec, StripError, ThermalParams
from thermalkms.kernels import (bose_factors, causal_propagator, decay_envelope, dispersion,
                                loglog_fit, omega2_modes, omega2_position, omega2_vacuum,
                                retarded_propagator, smeared_two_point, thermal_remainder)
from thermalkms.profiles import gaussian_packet

Q = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-14)
few = settings(max_examples=6)
betas = st.floats(0.5, 4.0)
packets = st.builds(gaussian_packet, st.floats(-2, 2), st.tuples(st.floats(-1, 1), st.just(0.0), st.just(0.0)),
                    st.floats(0.3, 1.0), st.floats(0.5, 1.5))


@given(st.floats(0, 50), betas)
def test_bose_factors_differ_by_one(k, beta):
    bp, bm = bose_factors(k, ThermalParams(1.0, beta))
    assert bp - bm == pytest.approx(1.0)
    assert bm == pytest.approx(math.exp(-beta * dispersion(k, ThermalParams(1.0, beta))) * bp)


def test_vacuum_bose_factors_and_bad_momentum():
    assert bose_factors(2.0, ThermalParams.vacuum_state()) == (1.0, 0.0)
    with pytest.raises(DomainError):
        dispersion(-1.0, ThermalParams())


@few
@given(st.floats(-3, 3), st.floats(0.1, 0.9), st.floats(0, 3), betas)
def test_split_matches_mode_sum_inside_the_strip(t, frac, r, beta):
    p = ThermalParams(1.0, beta)
    dt = complex(t, -frac * beta)
    a = omega2_position(dt, r, p, Q, method="split")
    b = omega2_position(dt, r, p, Q, method="modes")
    assert a.value == pytest.approx(b.value, rel=1e-6, abs=1e-9)


@given(st.floats(0.2, 5), st.floats(0, 3))
def test_vacuum_closed_form_at_imaginary_time(tau, r):
    # at dt = -i tau the invariant distance is sqrt(r^2 + tau^2)
    rho = math.hypot(r, tau)
    expected = kv(1, rho) / (4 * math.pi**2 * rho)
    assert omega2_vacuum(-1j * tau, r, 1.0).value == pytest.approx(expected, rel=1e-12)


@few
@given(st.floats(0.3, 3), st.floats(0, 2))
def test_vacuum_closed_form_matches_vacuum_mode_sum(tau, r):
    p = ThermalParams.vacuum_state(1.0)
    assert omega2_modes(-1j * tau, r, p, Q).value == pytest.approx(omega2_vacuum(-1j * tau, r, 1.0).value,
                                                                   rel=1e-7)


def test_thermal_remainder_vanishes_when_cold():
    assert abs(thermal_remainder(1.0, 0.5, ThermalParams(1.0, 60.0), Q)) < 1e-25
    assert thermal_remainder(1.0, 0.5, ThermalParams.vacuum_state(), Q).value == 0


def test_strip_and_cone_guards():
    p = ThermalParams(1.0, 1.0)
    with pytest.raises(StripError):
        omega2_position(-1.5j, 0.0, p)
    with pytest.raises(LightConeError):
        omega2_position(2.0, 2.0, p)
    with pytest.raises(StripError):
        omega2_modes(0.5, 1.0, p)
    f = gaussian_packet()
    with pytest.raises(StripError):
        smeared_two_point(f, f, 2.0j, p)


@few
@given(packets, packets, st.floats(-2, 2), betas)
def test_kms_condition_for_smeared_fields(f, g, t, beta):
    p = ThermalParams(1.0, beta)
    lhs = smeared_two_point(f, g, t + 1j * beta, p, Q)
    rhs = smeared_two_point(g.translate(t), f, 0, p, Q)
    assert lhs.value == pytest.approx(rhs.value, rel=1e-6, abs=1e-10)


@few
@given(packets, packets, betas)
def test_hermiticity_positivity_and_commutator(f, g, beta):
    p = ThermalParams(1.0, beta)
    wfg = smeared_two_point(f, g, 0, p, Q).value
    wgf = smeared_two_point(g, f, 0, p, Q).value
    assert wfg.conjugate() == pytest.approx(wgf, rel=1e-8, abs=1e-12)
    assert smeared_two_point(f, f, 0, p, Q).value.real > 0
    delta = causal_propagator(f, g, p, Q).value
    assert delta == pytest.approx(-1j * (wfg - wgf), rel=1e-6, abs=1e-10)
    # the commutator is state independent
    assert causal_propagator(f, g, ThermalParams(1.0, 2 * beta), Q).value == pytest.approx(delta, abs=1e-10)


@few
@given(packets, packets)
def test_retarded_minus_advanced_is_causal(f, g):
    p = ThermalParams(1.0, 1.0)
    dr = retarded_propagator(f, g, p, Q).value - retarded_propagator(g, f, p, Q).value
    assert dr == pytest.approx(causal_propagator(f, g, p, Q).value, rel=1e-6, abs=1e-10)


def test_retarded_propagator_vanishes_in_the_past():
    p = ThermalParams(1.0, 1.0)
    early, late = gaussian_packet(-8.0, sigma_t=0.3), gaussian_packet(8.0, sigma_t=0.3)
    assert abs(retarded_propagator(early, late, p, Q)) < 1e-12
    assert abs(retarded_propagator(late, early, p, Q)) > 1e-6


def test_loglog_fit_and_decay_envelope():
    x = np.array([1.0, 2.0, 4.0, 8.0])
    slope, icpt, resid = loglog_fit(x, 3.0 * x**-1.5)
    assert slope == pytest.approx(-1.5) and icpt == pytest.approx(math.log(3.0)) and resid < 1e-12
    with pytest.raises(DomainError):
        decay_envelope([0.5, 2.0], 0.0, ThermalParams.vacuum_state())
    rep = decay_envelope([5, 10, 20, 40], 0.0, ThermalParams.vacuum_state(), Q)
    assert -1.8 <= rep.slope <= -1.2 and np.all(np.isfinite(rep.scaled))
