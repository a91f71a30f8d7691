"""Lazy star-words of linear legs and quadratic densities.

The interaction density ``(1/2) int s(x) :phi(x)^2:`` does not close under
contraction with Gaussian test functions, so observables built from it are
kept as formal sums of star-words.  A word is a sequence of factors, each a
pointwise (normal-ordered) product of legs or a single density.  Its
expectation is the Wick sum over matchings with no pair inside one factor;
each connected component of a matching is a path or a cycle and is
evaluated in momentum space.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence, Union

from .errors import CapacityError, StripError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import ShiftIntegral, SmearingFunction
from . import momentum


@dataclass(frozen=True)
class Legs:
    """Pointwise product phi(f_1)...phi(f_n) (normal ordered w.r.t. the reference state)."""

    legs: tuple[SmearingFunction, ...]

    def translate(self, s: complex) -> "Legs":
        return Legs(tuple(f.translate(s) for f in self.legs))

    def conj(self) -> "Legs":
        return Legs(tuple(f.conj() for f in reversed(self.legs)))


@dataclass(frozen=True)
class Density:
    """(1/2) int s(x) :phi(x)^2: with kernel s."""

    kernel: SmearingFunction

    def translate(self, s: complex) -> "Density":
        return Density(self.kernel.translate(s))

    def conj(self) -> "Density":
        return Density(conjugate_smearing(self.kernel))


Factor = Union[Legs, Density]


def conjugate_smearing(f: SmearingFunction) -> SmearingFunction:
    time = f.time
    if isinstance(time, ShiftIntegral):
        time = ShiftIntegral(time.base, complex(time.a).conjugate(), complex(time.b).conjugate())
    return replace(f, time=time, shift=f.shift.conjugate())


def _as_kv(c) -> KernelValue:
    return c if isinstance(c, KernelValue) else KernelValue(complex(c))


@dataclass(frozen=True)
class Term:
    coefficient: KernelValue
    factors: tuple[Factor, ...] = ()


@dataclass(frozen=True)
class WordSum:
    """Formal linear combination of star-words; ``*`` is the star product."""

    terms: tuple[Term, ...] = ()

    @classmethod
    def one(cls) -> "WordSum":
        return cls((Term(KernelValue(1.0)),))

    @classmethod
    def zero(cls) -> "WordSum":
        return cls(())

    @classmethod
    def of(cls, *factors: Factor, coefficient=1.0) -> "WordSum":
        return cls((Term(_as_kv(coefficient), tuple(factors)),))

    @classmethod
    def legs(cls, *fs: SmearingFunction, coefficient=1.0) -> "WordSum":
        return cls.of(Legs(tuple(fs)), coefficient=coefficient)

    @classmethod
    def density(cls, kernel: SmearingFunction, coefficient=1.0) -> "WordSum":
        return cls.of(Density(kernel), coefficient=coefficient)

    def zero_like(self) -> "WordSum":
        return WordSum.zero()

    def is_zero(self) -> bool:
        return not self.terms

    def simplify(self) -> "WordSum":
        acc: dict = {}
        for t in self.terms:
            acc[t.factors] = acc[t.factors] + t.coefficient if t.factors in acc else t.coefficient
        return WordSum(tuple(Term(c, f) for f, c in acc.items()
                             if c.value != 0 or c.err_estimate > 0))

    def __add__(self, other: "WordSum") -> "WordSum":
        if isinstance(other, (int, float, complex)):
            other = WordSum.one().scale(other)
        return WordSum(self.terms + other.terms).simplify()

    __radd__ = __add__

    def __neg__(self) -> "WordSum":
        return self.scale(-1.0)

    def __sub__(self, other) -> "WordSum":
        return self + (-other)

    def scale(self, c) -> "WordSum":
        return WordSum(tuple(Term(t.coefficient * c, t.factors) for t in self.terms))

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, KernelValue)):
            return self.scale(other)
        out = [Term(a.coefficient * b.coefficient, a.factors + b.factors)
               for a in self.terms for b in other.terms]
        return WordSum(tuple(out)).simplify()

    def __rmul__(self, other):
        return self.scale(other)

    def translate(self, s: complex) -> "WordSum":
        if s == 0:
            return self
        return WordSum(tuple(Term(t.coefficient, tuple(f.translate(s) for f in t.factors))
                             for t in self.terms))

    def star_conj(self) -> "WordSum":
        return WordSum(tuple(Term(t.coefficient.conjugate(), tuple(f.conj() for f in reversed(t.factors)))
                             for t in self.terms)).simplify()

    def commutator(self, other: "WordSum") -> "WordSum":
        return self * other - other * self

    def __len__(self):
        return len(self.terms)


def from_observable(A) -> WordSum:
    """Lift an algebra.Observable (pointwise monomials) to a one-factor word sum."""
    out = []
    for mono in A.monomials:
        out.append(Term(mono.coefficient, (Legs(tuple(mono.legs)),) if mono.legs else ()))
    return WordSum(tuple(out)).simplify()


# ------------------------------------------------------------------ evaluation


def _imag_range(f: SmearingFunction) -> tuple[float, float]:
    lo = hi = f.shift.imag
    if isinstance(f.time, ShiftIntegral):
        ims = (complex(f.time.a).imag, complex(f.time.b).imag)
        lo, hi = lo + min(ims), hi + max(ims)
    return lo, hi


def _check_edge(early: SmearingFunction, late: SmearingFunction, params: ThermalParams):
    lo_a, hi_a = _imag_range(early)
    lo_b, hi_b = _imag_range(late)
    upper = float("inf") if params.vacuum else params.beta
    slack = 1e-12
    if lo_b - hi_a < -slack or hi_b - lo_a > upper + slack:
        raise StripError(
            f"contraction with relative imaginary shift in [{lo_b - hi_a:g}, {hi_b - lo_a:g}] "
            f"leaves [0, beta={params.beta:g}]")


@dataclass
class _Vertex:
    factor: int
    smearing: SmearingFunction
    is_density: bool


def _half_edges(factors: Sequence[Factor]):
    vertices: list[_Vertex] = []
    halves: list[int] = []
    for i, fac in enumerate(factors):
        if isinstance(fac, Legs):
            for f in fac.legs:
                vertices.append(_Vertex(i, f, False))
                halves.append(len(vertices) - 1)
        else:
            vertices.append(_Vertex(i, fac.kernel, True))
            halves.extend([len(vertices) - 1] * 2)
    return vertices, halves


def _matchings(halves: Sequence[int], vertices):
    idx = list(range(len(halves)))

    def rec(rest):
        if not rest:
            yield []
            return
        first, others = rest[0], rest[1:]
        for k, o in enumerate(others):
            if vertices[halves[first]].factor == vertices[halves[o]].factor:
                continue
            for m in rec(others[:k] + others[k + 1:]):
                yield [(first, o)] + m

    if len(idx) % 2:
        return
    yield from rec(idx)


class WickEvaluator:
    """Expectation values of word sums in a quasi-free thermal state, with component caching."""

    def __init__(self, params: ThermalParams, quad: QuadratureSpec | None = None):
        self.params = params
        self.quad = quad or QuadratureSpec()
        self._cache: dict = {}

    def _component(self, key, compute):
        if key not in self._cache:
            self._cache[key] = compute()
        return self._cache[key]

    def _evaluate_component(self, vertices, edges):
        """edges: list of (u, v) vertex pairs of one connected component."""
        verts = sorted({u for e in edges for u in e})
        degree = {v: 0 for v in verts}
        for u, v in edges:
            degree[u] += 1
            degree[v] += 1
        for u, v in edges:
            a, b = (u, v) if vertices[u].factor < vertices[v].factor else (v, u)
            _check_edge(vertices[a].smearing, vertices[b].smearing, self.params)
        ends = [v for v in verts if not vertices[v].is_density]
        if ends:
            chain = _walk(ends[0], edges)
            sm = tuple(vertices[v].smearing for v in chain)
            fw = tuple(vertices[chain[j]].factor < vertices[chain[j + 1]].factor
                       for j in range(len(chain) - 1))
            return self._component(("path", sm, fw),
                                   lambda: momentum.path_value(sm, fw, self.params, self.quad))
        if len(verts) == 2:
            a, b = sorted(verts, key=lambda v: vertices[v].factor)
            sa, sb = vertices[a].smearing, vertices[b].smearing
            return self._component(("bubble", sa, sb),
                                   lambda: momentum.bubble_value(sa, sb, self.params, self.quad))
        raise CapacityError(f"density cycles of length {len(verts)} are out of scope")

    def term_value(self, term: Term, connected: bool = False) -> KernelValue:
        vertices, halves = _half_edges(term.factors)
        n_dens = sum(1 for v in vertices if v.is_density)
        total = KernelValue(0.0)
        for match in _matchings(halves, vertices):
            edges = [(halves[a], halves[b]) for a, b in match]
            comps = _components(edges)
            if connected and not _factor_connected(term.factors, vertices, edges):
                continue
            val = KernelValue(1.0)
            for comp in comps:
                val = val * self._evaluate_component(vertices, comp)
            total = total + val
        return total * (0.5 ** n_dens) * term.coefficient

    def expectation(self, W: WordSum, connected: bool = False) -> KernelValue:
        """Expectation; with ``connected=True`` only matchings joining all factors are kept."""
        total = KernelValue(0.0)
        for t in W.terms:
            total = total + self.term_value(t, connected)
        return total


def _components(edges):
    adj: dict = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen, comps = set(), []
    for start in adj:
        if start in seen:
            continue
        stack, members = [start], set()
        while stack:
            x = stack.pop()
            if x in members:
                continue
            members.add(x)
            stack.extend(adj[x])
        seen |= members
        comps.append([e for e in edges if e[0] in members])
    return comps


def _walk(start, edges):
    """Vertex sequence of the path starting at leg ``start``."""
    remaining = list(edges)
    chain = [start]
    while True:
        cur = chain[-1]
        nxt = next((e for e in remaining if cur in e), None)
        if nxt is None:
            return chain
        remaining.remove(nxt)
        chain.append(nxt[1] if nxt[0] == cur else nxt[0])


def _factor_connected(factors, vertices, edges) -> bool:
    n = len(factors)
    if n <= 1:
        return True
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(vertices[u].factor)] = find(vertices[v].factor)
    return len({find(i) for i in range(n)}) == 1
