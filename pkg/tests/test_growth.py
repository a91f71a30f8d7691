import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thermalkms import CapacityError, ConfigurationError, DomainError, ThermalParams
from thermalkms.growth import (growth_amplitude, growth_components, growth_Q, simplex_phase_brute,
                               simplex_phase_constant, simplex_phase_integral)
from thermalkms.perturbation import InteractionSpec
from thermalkms.profiles import GaussianTimeDerivative, GaussianSpace, SmearingFunction, gaussian_packet

P = ThermalParams(1.0, 1.0)
ADIABATIC = InteractionSpec(1.0, L=None)
A_PROFILE = SmearingFunction(GaussianTimeDerivative(0.0, 0.5), GaussianSpace((0, 0, 0), 1.0))


@settings(max_examples=20)
@given(st.integers(1, 3), st.floats(-6, 6).filter(lambda a: abs(a) > 1e-3), st.floats(0.3, 4))
def test_closed_form_matches_simplex_quadrature(n, a, T):
    closed = complex(simplex_phase_integral(n, np.array([a]), T)[0])
    brute = simplex_phase_brute(n, a, T, nodes=30)
    assert closed == pytest.approx(brute, rel=1e-8, abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_small_phase_limit_is_the_simplex_volume(n):
    T = 2.0
    v = complex(simplex_phase_integral(n, np.array([1e-9]), T)[0])
    assert v == pytest.approx(T ** (n + 1) / math.factorial(n + 1), rel=1e-6)


@given(st.integers(1, 3), st.floats(0.5, 5))
def test_oscillating_remainder_grows_like_t_to_the_n_minus_one(n, a):
    # the T^n pieces cancel; the remainder is e^{-iaT} T^{n-1} / ((ia)^2 (n-1)!) + lower orders
    T = 400.0
    rem = complex(simplex_phase_integral(n, np.array([a]), T)[0] - simplex_phase_constant(n, a, T))
    leading = T ** (n - 1) / (a * a * math.factorial(n - 1))
    assert abs(rem) == pytest.approx(leading, rel=0.1)


def test_order_and_observable_guards():
    with pytest.raises(DomainError):
        simplex_phase_integral(0, np.array([1.0]), 1.0)
    with pytest.raises(CapacityError):
        growth_Q(4, A_PROFILE, ADIABATIC, P, 10.0)
    with pytest.raises(ConfigurationError):
        growth_Q(1, gaussian_packet(), ADIABATIC, P, 10.0)
    with pytest.raises(ConfigurationError):
        growth_Q(1, A_PROFILE, ADIABATIC.with_L(10.0), P, 10.0)


def test_components_sum_and_envelope():
    const, plus, minus = growth_components(1, A_PROFILE, ADIABATIC, P, 20.0)
    total = growth_Q(1, A_PROFILE, ADIABATIC, P, 20.0)
    assert total.value == pytest.approx((const + plus + minus).value)
    env = growth_amplitude(1, A_PROFILE, ADIABATIC, P, 20.0)
    assert env.value.real == pytest.approx(abs(plus.value) + abs(minus.value))
    assert max(c.err_estimate for c in (const, plus, minus)) < 1e-8 * abs(const.value)


def test_first_order_amplitude_decays_and_third_order_grows_slower_than_t():
    a1 = [abs(growth_amplitude(1, A_PROFILE, ADIABATIC, P, T)) for T in (20.0, 80.0)]
    a3 = [abs(growth_amplitude(3, A_PROFILE, ADIABATIC, P, T)) for T in (20.0, 80.0)]
    assert a1[1] < a1[0]
    assert a3[1] / a3[0] < 4.0
