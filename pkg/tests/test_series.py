import pytest
from hypothesis import given, strategies as st

from thermalkms import DomainError, KernelValue
from thermalkms.series import FormalSeries, series_rows

cvals = st.builds(complex, st.floats(-3, 3), st.floats(-3, 3))


def series(order=4, first=None):
    cs = st.lists(cvals, min_size=order + 1, max_size=order + 1)
    if first is not None:
        cs = cs.map(lambda c: [first] + c[1:])
    return cs.map(lambda c: FormalSeries(tuple(c), order))


def approx_eq(a, b, tol=1e-8):
    return all(abs(complex(x) - complex(y)) <= tol * (1 + abs(complex(y)))
               for x, y in zip(a.coefficients, b.coefficients))


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert approx_eq((a * b) * c, a * (b * c))
    assert approx_eq(a * (b + c), a * b + a * c)
    assert approx_eq(a * b, b * a)
    assert approx_eq(a - a, FormalSeries.constant(0, 4))


@given(series(first=1.0 + 0.5j))
def test_inverse(a):
    one = FormalSeries.constant(1, a.order)
    assert approx_eq(a * a.inverse(), one, 1e-7)


@given(series(3, first=1.0))
def test_log_of_product_is_sum_of_logs(a):
    b = FormalSeries((1.0, 0.5, -0.25, 2.0), 3)
    assert approx_eq((a * b).log(), a.log() + b.log(), 1e-7)


def test_truncation_padding_and_errors():
    s = FormalSeries((1, 2), 3)
    assert s.coefficients == (1, 2, 0, 0) and len(s) == 4
    assert (s + FormalSeries((1,), 1)).order == 1
    assert s.truncate(0).coefficients == (1,)
    with pytest.raises(DomainError):
        FormalSeries((1,), -1)
    with pytest.raises(DomainError):
        FormalSeries((0, 1), 1).inverse()
    with pytest.raises(DomainError):
        FormalSeries((2, 1), 1).log()
    assert (2 * s)[1] == 4 and (3 - s)[0] == 2


def test_kernel_value_coefficients_and_rows():
    s = FormalSeries((KernelValue(1.0, 1e-9), KernelValue(2j)), 1)
    rows = series_rows(s)
    assert rows[0] == (0, 1.0, 0.0, 1e-9) and rows[1] == (1, 0.0, 2.0, 0.0)
    assert series_rows(FormalSeries((1, 2j), 1))[1] == (1, 0.0, 2.0, 0.0)
    assert s.map(lambda c: c * 2)[1].value == 4j
