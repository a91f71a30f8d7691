import pytest
from hypothesis import given, settings, strategies as st

from thermalkms import CapacityError, DomainError, QuadratureSpec, StripError, ThermalParams
from thermalkms.algebra import Observable, ThermalPairing, star_product
from thermalkms.perturbation import InteractionSpec
from thermalkms.profiles import gaussian_packet
from thermalkms.words import Density, Legs, WickEvaluator, WordSum, from_observable

P = ThermalParams(1.0, 1.0)
Q = QuadratureSpec(rel_tol=1e-9, abs_tol=1e-14)
LEGS = [gaussian_packet(0.0), gaussian_packet(1.0, (0.5, 0, 0)), gaussian_packet(-0.5, (0, 0.3, 0), 0.7),
        gaussian_packet(2.0, sigma_x=1.5)]
idx = st.lists(st.integers(0, len(LEGS) - 1), min_size=1, max_size=2)


@settings(max_examples=10)
@given(idx, idx)
def test_leg_words_agree_with_the_star_algebra(a, b):
    A = Observable.product(*[LEGS[i] for i in a])
    B = Observable.product(*[LEGS[i] for i in b])
    expected = star_product(A, B, pairing=ThermalPairing(P, Q)).scalar_part()
    got = WickEvaluator(P, Q).expectation(from_observable(A) * from_observable(B))
    assert got.value == pytest.approx(expected.value, rel=1e-8, abs=1e-14)


def test_connected_expectation_drops_factorized_matchings():
    f, g = LEGS[0], LEGS[1]
    ev = WickEvaluator(P, Q)
    W = WordSum.legs(f, f) * WordSum.legs(g, g)
    full = ev.expectation(W).value
    conn = ev.expectation(W, connected=True).value
    pair = ThermalPairing(P, Q)
    assert conn == pytest.approx(2 * pair(f, g).value ** 2, rel=1e-9)
    assert full == pytest.approx(conn, rel=1e-9)  # normal ordering removes self-contractions


def test_word_sum_structure():
    f, g = LEGS[0], LEGS[1]
    W = WordSum.legs(f) * WordSum.legs(g)
    assert len(W) == 1 and len(W.terms[0].factors) == 2
    c = WordSum.legs(f).commutator(WordSum.legs(g))
    assert len(c) == 2
    assert (W - W).is_zero()
    assert WordSum.zero().is_zero() and not WordSum.one().is_zero()
    conj = W.scale(2j).star_conj()
    assert conj.terms[0].coefficient.value == -2j
    assert [fa.legs[0] for fa in conj.terms[0].factors] == [g, f]
    shifted = W.translate(1.0)
    assert shifted.terms[0].factors[0].legs[0].time_center == 1.0


def test_density_words_satisfy_kms():
    spec = InteractionSpec(1.0, L=3.0)
    f, g = gaussian_packet(0.5, sigma_t=0.5), gaussian_packet(1.0, sigma_t=0.7, sigma_x=1.5)
    A, H = WordSum.legs(f, g), WordSum.density(spec.generator_kernel())
    ev = WickEvaluator(P, Q)
    lhs = ev.expectation(A * H.translate(1.5 + 1j * P.beta))
    rhs = ev.expectation(H.translate(1.5) * A)
    assert lhs.value == pytest.approx(rhs.value, rel=1e-7)
    # a half-way shift is a genuinely different number
    assert abs(ev.expectation(A * H.translate(0.5j)).value - rhs.value) > 1e-5


def test_evaluator_guards():
    spec = InteractionSpec(1.0, L=3.0)
    H = WordSum.density(spec.generator_kernel())
    f = gaussian_packet(0.0)
    ev = WickEvaluator(P, Q)
    with pytest.raises(StripError):
        ev.expectation(WordSum.legs(f) * WordSum.legs(f.translate(2j)))
    with pytest.raises(CapacityError):
        ev.expectation(WordSum.legs(gaussian_packet(0.0, (1, 0, 0))) * H * WordSum.legs(f))
    with pytest.raises(CapacityError):
        ev.expectation(WordSum.legs(f) * H * H.translate(1.0) * WordSum.legs(f))
    # three-density cycles are not evaluated
    with pytest.raises(CapacityError):
        ev.expectation(H * H.translate(0.5) * H.translate(1.0))
    assert ev.expectation(WordSum.legs(f)).value == 0
    assert ev.expectation(WordSum.one()).value == 1
    assert isinstance(H.terms[0].factors[0], Density) and isinstance(WordSum.legs(f).terms[0].factors[0], Legs)
    unit = WordSum.density(InteractionSpec(1.0, L=None).generator_kernel())
    with pytest.raises(DomainError):
        ev.expectation(unit * unit.translate(1.0))
