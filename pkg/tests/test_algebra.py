import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from thermalkms import CapacityError, ConfigurationError, KernelValue, QuadratureSpec, ThermalParams
from thermalkms.algebra import (ContractionCache, DifferenceKernel, Observable, ThermalPairing, commutator,
                                connected_expectation, perfect_matchings, set_partitions, star_chain,
                                star_product, time_translate, wick_reorder, wick_sum)
from thermalkms.profiles import gaussian_packet

N_LEGS = 5
LEGS = [gaussian_packet(float(i)) for i in range(N_LEGS)]


def label(f):
    return int(round(f.time.center + f.shift.real))


class MatrixPairing:
    """Synthetic two-point function: an arbitrary complex matrix over the leg labels."""

    def __init__(self, M):
        self.M = np.asarray(M)

    def __call__(self, f, g):
        return KernelValue(complex(self.M[label(f), label(g)]))


cvals = st.builds(complex, st.floats(-2, 2), st.floats(-2, 2))
matrices = st.lists(cvals, min_size=N_LEGS * N_LEGS, max_size=N_LEGS * N_LEGS).map(
    lambda v: np.array(v).reshape(N_LEGS, N_LEGS))
hermitian = matrices.map(lambda M: M + M.conj().T)
symmetric = matrices.map(lambda M: (M + M.T).real)
leg_idx = st.lists(st.integers(0, N_LEGS - 1), min_size=0, max_size=3)


@st.composite
def observables(draw):
    terms = draw(st.lists(st.tuples(cvals, leg_idx), min_size=1, max_size=3))
    out = Observable.zero()
    for c, idx in terms:
        out = out + Observable.product(*[LEGS[i] for i in idx], coefficient=c)
    return out


def close(A, B, tol=1e-9):
    return A.is_close(B, tol)


@given(observables(), observables(), observables(), matrices)
def test_star_product_is_associative(A, B, C, M):
    p = MatrixPairing(M)
    left = star_product(star_product(A, B, pairing=p), C, pairing=p)
    right = star_product(A, star_product(B, C, pairing=p), pairing=p)
    assert close(left, right, 1e-8)


@given(st.integers(0, N_LEGS - 1), st.integers(0, N_LEGS - 1), matrices)
def test_canonical_commutation(i, j, M):
    p = MatrixPairing(M)
    c = commutator(Observable.field(LEGS[i]), Observable.field(LEGS[j]), pairing=p)
    assert close(c, Observable.scalar(M[i, j] - M[j, i]))


@given(observables(), observables(), hermitian)
def test_star_conjugation_reverses_products(A, B, M):
    p = MatrixPairing(M)
    lhs = star_product(A, B, pairing=p).star_conj()
    rhs = star_product(B.star_conj(), A.star_conj(), pairing=p)
    assert close(lhs, rhs)


@given(st.lists(st.integers(0, N_LEGS - 1), min_size=0, max_size=6), matrices)
def test_chain_expectation_is_the_wick_sum(idx, M):
    p = MatrixPairing(M)
    legs = [LEGS[i] for i in idx]
    chain = star_chain([Observable.field(f) for f in legs], p).scalar_part()
    assert chain.value == pytest.approx(wick_sum(legs, p).value, abs=1e-9)


@given(st.lists(st.integers(0, N_LEGS - 1), min_size=3, max_size=5), matrices)
def test_quasi_free_fields_have_no_higher_connected_parts(idx, M):
    p = MatrixPairing(M)
    c = connected_expectation([Observable.field(LEGS[i]) for i in idx], pairing=p)
    assert abs(c.value) < 1e-9


@given(st.integers(0, N_LEGS - 1), st.integers(0, N_LEGS - 1), matrices)
def test_connected_two_point(i, j, M):
    p = MatrixPairing(M)
    c = connected_expectation([Observable.field(LEGS[i]), Observable.field(LEGS[j])], pairing=p)
    assert c.value == pytest.approx(M[i, j])


@given(observables(), observables(), matrices, symmetric)
def test_wick_reordering_intertwines_star_products(A, B, M, W):
    p, w = MatrixPairing(M), MatrixPairing(W)
    shifted = MatrixPairing(M + W)
    lhs = wick_reorder(star_product(A, B, pairing=p), w)
    rhs = star_product(wick_reorder(A, w), wick_reorder(B, w), pairing=shifted)
    assert close(lhs, rhs, 1e-8)


@pytest.mark.parametrize("n,bell", [(0, 1), (1, 1), (2, 2), (3, 5), (4, 15), (5, 52)])
def test_set_partition_counts(n, bell):
    assert sum(1 for _ in set_partitions(range(n))) == bell


@pytest.mark.parametrize("n", [0, 2, 4, 6, 3])
def test_perfect_matching_counts(n):
    expected = 0 if n % 2 else math.prod(range(1, n, 2))
    assert sum(1 for _ in perfect_matchings(range(n))) == expected


def test_connected_capacity_limit():
    fs = [Observable.field(LEGS[0])] * 7
    with pytest.raises(CapacityError):
        connected_expectation(fs, pairing=MatrixPairing(np.eye(N_LEGS)))
    with pytest.raises(ValueError):
        connected_expectation([], pairing=MatrixPairing(np.eye(N_LEGS)))


@given(observables())
def test_json_round_trip(A):
    assert close(Observable.from_json(A.to_json()), A, 0.0)


def test_linear_structure():
    f, g = LEGS[0], LEGS[1]
    A = Observable.product(f, g) + Observable.product(g, f)
    assert len(A.monomials) == 1 and A.monomials[0].coefficient.value == 2
    assert (A - A).simplify().monomials == ()
    assert Observable.field(f).pointwise(Observable.field(g)).degree == 2
    assert (3 * Observable.one()).scalar_part().value == 3
    assert time_translate(Observable.field(f), 2.0).monomials[0].legs[0].time_center == 2.0


def test_thermal_pairing_cache_and_difference_kernel():
    p = ThermalParams(1.0, 1.0)
    q = QuadratureSpec(rel_tol=1e-9)
    cache = ContractionCache()
    pair = ThermalPairing(p, q, cache)
    f, g = gaussian_packet(0.0), gaussian_packet(1.0)
    first = pair(f, g)
    # the cache keys on the relative shift, so a common translation is a hit
    again = pair(f.translate(5.0), g.translate(5.0))
    assert again.value == first.value and cache.hits == 1 and len(cache) == 1
    d = DifferenceKernel(p, ThermalParams(1.0, 2.0), q)
    assert d(f, g).value == pytest.approx(d(g, f).value, abs=1e-10)
    with pytest.raises(ConfigurationError):
        DifferenceKernel(p, p)
    with pytest.raises(ConfigurationError):
        DifferenceKernel(p, ThermalParams(2.0, 1.0))
