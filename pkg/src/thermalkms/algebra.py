"""Polynomial observables in smeared linear fields and their star-product algebra.

An :class:`Observable` is a finite sum of *pointwise* monomials
``c * phi(f_1) ... phi(f_n)``.  The star product contracts legs of the left
factor with legs of the right factor through the thermal two-point function
(left leg in the first slot), and the state is evaluation at ``phi = 0``:
``expectation(A)`` is the coefficient of the constant monomial.
"""
from __future__ import annotations

import itertools
import json
import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .errors import CapacityError, ConfigurationError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import (GaussianCutoff, GaussianSpace, GaussianTime, GaussianTimeDerivative,
                       SmearingFunction, Switch, SwitchDerivative, SmoothBump, UnitSpace)
from . import kernels

N_MAX_CONNECTED = 6


# ------------------------------------------------------------ contractions


class ContractionCache:
    """Two-point values keyed by (unshifted legs, relative complex shift).

    Reads are lock-free; inserts take a lock, so concurrent workers may share
    one cache.
    """

    def __init__(self):
        self._store: dict = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @staticmethod
    def key(f: SmearingFunction, g: SmearingFunction):
        rel = g.shift - f.shift
        return (f.translate(-f.shift), g.translate(-g.shift), complex(round(rel.real, 14), round(rel.imag, 14)))

    def get_or_compute(self, f, g, compute: Callable[[], KernelValue]) -> KernelValue:
        k = self.key(f, g)
        hit = self._store.get(k)
        if hit is not None:
            self.hits += 1
            return hit
        value = compute()
        with self._lock:
            self._store.setdefault(k, value)
            self.misses += 1
        return self._store[k]

    def __len__(self):
        return len(self._store)


class ThermalPairing:
    """Callable pairing ``(f, g) -> <w2^beta, f (x) g>`` with caching."""

    def __init__(self, params: ThermalParams, quad: QuadratureSpec | None = None,
                 cache: ContractionCache | None = None):
        self.params = params
        self.quad = quad or QuadratureSpec()
        self.cache = cache if cache is not None else ContractionCache()

    def __call__(self, f: SmearingFunction, g: SmearingFunction) -> KernelValue:
        return self.cache.get_or_compute(
            f, g, lambda: kernels.smeared_two_point(f, g, 0, self.params, self.quad))


class DifferenceKernel:
    """Symmetric smooth kernel w = w2^{a} - w2^{b} (distinct temperatures, or thermal minus vacuum)."""

    def __init__(self, params_a: ThermalParams, params_b: ThermalParams,
                 quad: QuadratureSpec | None = None):
        if params_a == params_b:
            raise ConfigurationError("difference kernel needs two distinct states")
        if params_a.m != params_b.m:
            raise ConfigurationError("difference kernel needs equal masses")
        self.a = ThermalPairing(params_a, quad)
        self.b = ThermalPairing(params_b, quad)

    def __call__(self, f, g) -> KernelValue:
        return self.a(f, g) - self.b(f, g)


# -------------------------------------------------------------- observables


@dataclass(frozen=True)
class Monomial:
    coefficient: KernelValue
    legs: tuple[SmearingFunction, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.legs)


def _key(legs):
    return tuple(sorted(legs, key=repr))


@dataclass(frozen=True)
class Observable:
    """Immutable polynomial in smeared linear fields (pointwise monomials)."""

    monomials: tuple[Monomial, ...] = ()

    # construction -----------------------------------------------------
    @classmethod
    def one(cls) -> "Observable":
        return cls((Monomial(KernelValue(1.0)),))

    @classmethod
    def zero(cls) -> "Observable":
        return cls(())

    @classmethod
    def scalar(cls, c) -> "Observable":
        c = c if isinstance(c, KernelValue) else KernelValue(c)
        return cls((Monomial(c),)).simplify()

    @classmethod
    def field(cls, f: SmearingFunction, coefficient: complex = 1.0) -> "Observable":
        return cls((Monomial(KernelValue(coefficient), (f,)),))

    @classmethod
    def product(cls, *legs: SmearingFunction, coefficient: complex = 1.0) -> "Observable":
        """Pointwise product phi(f_1)...phi(f_n)."""
        return cls((Monomial(KernelValue(coefficient), tuple(legs)),))

    # linear structure ---------------------------------------------------
    def simplify(self, drop_below: float = 0.0) -> "Observable":
        acc: dict = {}
        order = []
        for mono in self.monomials:
            k = _key(mono.legs)
            if k not in acc:
                acc[k] = mono.coefficient
                order.append(k)
            else:
                acc[k] = acc[k] + mono.coefficient
        out = tuple(Monomial(acc[k], k) for k in order
                    if abs(acc[k].value) > drop_below or acc[k].err_estimate > 0)
        return Observable(out)

    def __add__(self, other: "Observable") -> "Observable":
        return Observable(self.monomials + other.monomials).simplify()

    def __neg__(self):
        return Observable(tuple(Monomial(-m.coefficient, m.legs) for m in self.monomials))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Observable":
        return Observable(tuple(Monomial(m.coefficient * c, m.legs) for m in self.monomials))

    __rmul__ = scale

    def pointwise(self, other: "Observable") -> "Observable":
        out = [Monomial(a.coefficient * b.coefficient, a.legs + b.legs)
               for a in self.monomials for b in other.monomials]
        return Observable(tuple(out)).simplify()

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.monomials), default=0)

    def scalar_part(self) -> KernelValue:
        total = KernelValue(0.0)
        for m in self.monomials:
            if not m.legs:
                total = total + m.coefficient
        return total

    def star_conj(self) -> "Observable":
        """A*: conjugate coefficients and legs, reverse leg order."""
        return Observable(tuple(Monomial(m.coefficient.conjugate(), tuple(f.conj() for f in reversed(m.legs)))
                                for m in self.monomials))

    def translate(self, s: complex) -> "Observable":
        return time_translate(self, s)

    def is_close(self, other: "Observable", atol: float) -> bool:
        diff = (self - other).simplify()
        return all(abs(m.coefficient.value) <= atol for m in diff.monomials)

    # serialization --------------------------------------------------------
    def to_json(self) -> str:
        return json.dumps([
            {"re": m.coefficient.real, "im": m.coefficient.imag, "err": m.coefficient.err_estimate,
             "legs": [smearing_to_dict(f) for f in m.legs]}
            for m in self.monomials
        ])

    @classmethod
    def from_json(cls, text: str) -> "Observable":
        monos = []
        for item in json.loads(text):
            c = KernelValue(complex(item["re"], item["im"]), item.get("err", 0.0))
            monos.append(Monomial(c, tuple(smearing_from_dict(d) for d in item["legs"])))
        return cls(tuple(monos))


# --------------------------------------------------------- profile (de)serialization

_TIME_TYPES = {"gaussian": GaussianTime, "gaussian_derivative": GaussianTimeDerivative,
               "bump": SmoothBump, "switch_derivative": SwitchDerivative, "switch": Switch}
_SPACE_TYPES = {"gaussian": GaussianSpace, "cutoff": GaussianCutoff, "unit": UnitSpace}


def _tagged(obj, table):
    for tag, cls in table.items():
        if type(obj) is cls:
            d = {k: v for k, v in obj.__dict__.items()}
            d = {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
            return {"kind": tag, **d}
    raise ConfigurationError(f"cannot serialize profile {obj!r}")


def smearing_to_dict(f: SmearingFunction) -> dict:
    return {"time": _tagged(f.time, _TIME_TYPES), "space": _tagged(f.space, _SPACE_TYPES),
            "shift": [f.shift.real, f.shift.imag]}


def smearing_from_dict(d: dict) -> SmearingFunction:
    def build(spec, table):
        spec = dict(spec)
        kind = spec.pop("kind")
        if kind not in table:
            raise ConfigurationError(f"unknown profile kind {kind!r}")
        if "center" in spec and isinstance(spec["center"], list):
            spec["center"] = tuple(spec["center"])
        return table[kind](**spec)

    shift = d.get("shift", [0.0, 0.0])
    return SmearingFunction(build(d["time"], _TIME_TYPES), build(d["space"], _SPACE_TYPES),
                            complex(shift[0], shift[1]))


# ---------------------------------------------------------------- operations


def _partial_matchings(n: int, m: int):
    """All injective partial maps from a subset of range(n) into range(m)."""
    for k in range(min(n, m) + 1):
        for left in itertools.combinations(range(n), k):
            for right in itertools.permutations(range(m), k):
                yield tuple(zip(left, right))


def star_product(A: Observable, B: Observable, params: ThermalParams | None = None,
                 quad: QuadratureSpec | None = None, pairing=None) -> Observable:
    """A * B: sum over contractions of A-legs (first slot) with B-legs (second slot)."""
    pairing = pairing or ThermalPairing(params, quad)
    out = []
    for a in A.monomials:
        for b in B.monomials:
            for match in _partial_matchings(a.degree, b.degree):
                coef = a.coefficient * b.coefficient
                for i, j in match:
                    coef = coef * pairing(a.legs[i], b.legs[j])
                used_a = {i for i, _ in match}
                used_b = {j for _, j in match}
                legs = tuple(l for i, l in enumerate(a.legs) if i not in used_a) + \
                    tuple(l for j, l in enumerate(b.legs) if j not in used_b)
                out.append(Monomial(coef, legs))
    return Observable(tuple(out)).simplify()


def star_chain(factors: Sequence[Observable], pairing) -> Observable:
    result = Observable.one()
    for F in factors:
        result = star_product(result, F, pairing=pairing)
    return result


def expectation(A: Observable, params: ThermalParams | None = None,
                quad: QuadratureSpec | None = None) -> KernelValue:
    """Quasi-free state: evaluation at phi = 0, i.e. the constant coefficient."""
    return A.scalar_part()


def commutator(A: Observable, B: Observable, params: ThermalParams | None = None,
               quad: QuadratureSpec | None = None, pairing=None) -> Observable:
    pairing = pairing or ThermalPairing(params, quad)
    return star_product(A, B, pairing=pairing) - star_product(B, A, pairing=pairing)


def time_translate(A: Observable, shift: complex) -> Observable:
    """alpha_shift(A): every leg moved forward in time by ``shift`` (may be complex).

    Strip violations surface when the translated legs are contracted.
    """
    if shift == 0:
        return A
    return Observable(tuple(Monomial(m.coefficient, tuple(f.translate(shift) for f in m.legs))
                            for m in A.monomials))


def set_partitions(items: Sequence):
    """All set partitions of ``items``; blocks keep the input order."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def connected_expectation(factors: Sequence[Observable], params: ThermalParams | None = None,
                          quad: QuadratureSpec | None = None, pairing=None,
                          n_max: int = N_MAX_CONNECTED) -> KernelValue:
    """Truncated function w^c(F_1 (x) ... (x) F_n) by Moebius inversion over set partitions."""
    n = len(factors)
    if n == 0:
        raise ValueError("connected function needs at least one factor")
    if n > n_max:
        raise CapacityError(f"connected functions are limited to n <= {n_max} (got {n})")
    pairing = pairing or ThermalPairing(params, quad)
    full: dict[tuple[int, ...], KernelValue] = {}

    def moment(block):
        key = tuple(block)
        if key not in full:
            full[key] = star_chain([factors[i] for i in key], pairing).scalar_part()
        return full[key]

    total = KernelValue(0.0)
    for part in set_partitions(range(n)):
        k = len(part)
        term = KernelValue((-1) ** (k - 1) * math.factorial(k - 1))
        for block in part:
            term = term * moment(sorted(block))
        total = total + term
    return total


def wick_reorder(A: Observable, w_kernel: Callable[[SmearingFunction, SmearingFunction], KernelValue]
                 ) -> Observable:
    """gamma_w(A) = exp(1/2 <w, d^2/dphi^2>) A for a symmetric kernel w.

    Every set of disjoint leg pairs inside a monomial is contracted with w;
    with this normalization gamma_w maps the w2-star product to the
    (w2 + w)-star product.
    """
    out = []
    for mono in A.monomials:
        for pairs, rest in _self_matchings(list(range(mono.degree))):
            coef = mono.coefficient
            for i, j in pairs:
                coef = coef * w_kernel(mono.legs[i], mono.legs[j])
            out.append(Monomial(coef, tuple(mono.legs[i] for i in rest)))
    return Observable(tuple(out)).simplify()


def _self_matchings(idx: list[int]):
    """Partial matchings within ``idx``: yields (pairs, unmatched)."""
    if not idx:
        yield [], []
        return
    first, rest = idx[0], idx[1:]
    for pairs, un in _self_matchings(rest):
        yield pairs, [first] + un
    for k, other in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for pairs, un in _self_matchings(remaining):
            yield [(first, other)] + pairs, un


def perfect_matchings(idx: Sequence[int]) -> Iterable[list[tuple[int, int]]]:
    """Brute-force perfect matchings with pairs (earlier, later)."""
    idx = list(idx)
    if not idx:
        yield []
        return
    if len(idx) % 2:
        return
    first, rest = idx[0], idx[1:]
    for k, other in enumerate(rest):
        for m in perfect_matchings(rest[:k] + rest[k + 1:]):
            yield [(first, other)] + m


def wick_sum(legs: Sequence[SmearingFunction], pairing) -> KernelValue:
    """w(phi(f_1) * ... * phi(f_n)) as the sum over ordered pairings of w2 products."""
    total = KernelValue(0.0)
    for match in perfect_matchings(range(len(legs))):
        term = KernelValue(1.0)
        for i, j in match:
            term = term * pairing(legs[i], legs[j])
        total = total + term
    return total
