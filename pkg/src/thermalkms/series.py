"""Truncated formal power series in the coupling constant."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from .errors import DomainError


def _is_zero(c) -> bool:
    if isinstance(c, (int, float, complex)):
        return c == 0
    zero = getattr(c, "is_zero", None)
    return bool(zero()) if callable(zero) else False


@dataclass(frozen=True)
class FormalSeries:
    """sum_{n <= order} c_n lambda^n with coefficients in a ring.

    Coefficients may be numbers or any type supporting ``+``, ``-``, ``*``
    and scalar multiplication (observables use the star product for ``*``).
    ``one`` and ``zero`` give the ring's units for non-numeric coefficients.
    """

    coefficients: tuple
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise DomainError("truncation order must be >= 0")
        cs = tuple(self.coefficients)[: self.order + 1]
        if len(cs) < self.order + 1:
            pad = self._zero_like(cs[0] if cs else 0)
            cs = cs + (pad,) * (self.order + 1 - len(cs))
        object.__setattr__(self, "coefficients", cs)

    @staticmethod
    def _zero_like(c):
        if isinstance(c, (int, float, complex)):
            return 0
        return c.zero_like() if hasattr(c, "zero_like") else 0 * c

    @classmethod
    def constant(cls, c, order: int) -> "FormalSeries":
        return cls((c,), order)

    def __getitem__(self, n: int):
        return self.coefficients[n]

    def __len__(self):
        return self.order + 1

    def truncate(self, order: int) -> "FormalSeries":
        return FormalSeries(self.coefficients, min(order, self.order))

    def _align(self, other):
        if not isinstance(other, FormalSeries):
            other = FormalSeries.constant(other, self.order)
        n = min(self.order, other.order)
        return self.truncate(n), other.truncate(n), n

    def __add__(self, other):
        a, b, n = self._align(other)
        return FormalSeries(tuple(x + y for x, y in zip(a.coefficients, b.coefficients)), n)

    __radd__ = __add__

    def __neg__(self):
        return FormalSeries(tuple(-c for c in self.coefficients), self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "FormalSeries":
        return FormalSeries(tuple(c * s if isinstance(c, (int, float, complex)) else c.scale(s)
                                  for c in self.coefficients), self.order)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        a, b, n = self._align(other)
        out = []
        for k in range(n + 1):
            acc = None
            for i in range(k + 1):
                x, y = a.coefficients[i], b.coefficients[k - i]
                if _is_zero(x) or _is_zero(y):
                    continue
                term = x * y
                acc = term if acc is None else acc + term
            out.append(acc if acc is not None else self._zero_like(a.coefficients[0]))
        return FormalSeries(tuple(out), n)

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex)):
            return self.scale(other)
        return FormalSeries.constant(other, self.order) * self

    def inverse(self, one=1) -> "FormalSeries":
        """Multiplicative inverse; the order-0 coefficient must be invertible.

        For ring-valued coefficients the order-0 coefficient must equal ``one``.
        """
        c0 = self.coefficients[0]
        if isinstance(c0, (int, float, complex)):
            if c0 == 0:
                raise DomainError("order-0 coefficient is not invertible")
            return _inverse_unipotent(self * (1.0 / c0), 1) * (1.0 / c0)
        return _inverse_unipotent(self, one)

    def log(self) -> "FormalSeries":
        """log(1 + x) for numeric series with order-0 coefficient 1."""
        if abs(complex(self.coefficients[0]) - 1) > 1e-12:
            raise DomainError("log needs order-0 coefficient 1")
        x = self - 1
        out = FormalSeries.constant(0, self.order)
        power = FormalSeries.constant(1, self.order)
        for k in range(1, self.order + 1):
            power = power * x
            out = out + power * ((-1) ** (k + 1) / k)
        return out

    def map(self, fn: Callable[[Any], Any]) -> "FormalSeries":
        return FormalSeries(tuple(fn(c) for c in self.coefficients), self.order)


def _inverse_unipotent(s: FormalSeries, one) -> FormalSeries:
    """(1 + x)^-1 = sum_k (-x)^k, exact up to the truncation order."""
    x = s - FormalSeries.constant(one, s.order)
    result = FormalSeries.constant(one, s.order)
    power = FormalSeries.constant(one, s.order)
    for _ in range(s.order):
        power = power * (-x)
        result = result + power
    return result


def series_rows(series: FormalSeries) -> list[tuple[int, float, float, float]]:
    """(order, re, im, err) rows for numeric or KernelValue coefficients."""
    rows = []
    for n, c in enumerate(series.coefficients):
        if hasattr(c, "as_row"):
            re, im, err = c.as_row()
        else:
            c = complex(c)
            re, im, err = c.real, c.imag, 0.0
        rows.append((n, re, im, err))
    return rows
