"""Quadratic (mass) perturbation: generator K, Dyson intertwiner, perturbed dynamics,
interacting KMS expectations and the leading relative entropy.

All series are in powers of the coupling ``lambda``; the generator is kept at
first order, ``K = lambda * H(h chi'_-) + O(lambda^2)``, where ``H(s)`` is the
normal-ordered density ``(1/2) int s phi^2``.  Single time integrals of
translated densities are done exactly through the Fourier transform of the
shift-integral profile; integrals over simplices of dimension >= 2 use
:class:`SimplexQuadrature` nodes.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import CapacityError, ConfigurationError, DomainError
from .params import KernelValue, QuadratureSpec, ThermalParams
from .profiles import (GaussianCutoff, ShiftIntegral, SmearingFunction, Switch, SwitchDerivative,
                       UnitSpace)
from .quadrature import SimplexQuadrature
from .series import FormalSeries
from .words import Density, Legs, Term, WickEvaluator, WordSum, from_observable
from . import momentum

MAX_DYSON_ORDER = 3
MAX_KMS_ORDER = 2


@dataclass(frozen=True)
class InteractionSpec:
    """V = (1/2) int h chi phi^2 with a smoothstep switch of ramp length ``eps``.

    ``L=None`` selects the adiabatic limit h == 1, evaluated by momentum
    conservation.
    """

    eps: float = 1.0
    shape: str = "smoothstep2"
    L: float | None = 10.0
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)
    kind: str = "mass"

    def __post_init__(self):
        if self.kind != "mass":
            raise ConfigurationError("only the quadratic mass perturbation (1/2) phi^2 is supported")
        if not self.eps > 0:
            raise ConfigurationError("eps must be > 0")
        if self.L is not None and not self.L > 0:
            raise ConfigurationError("L must be > 0 when finite")
        SwitchDerivative(self.eps, self.shape)

    @property
    def adiabatic(self) -> bool:
        return self.L is None

    def spatial(self):
        return UnitSpace(self.center) if self.L is None else GaussianCutoff(self.L, self.center)

    def generator_kernel(self) -> SmearingFunction:
        """h(x) chi'_-(t): kernel of the order-lambda generator."""
        return SmearingFunction(SwitchDerivative(self.eps, self.shape), self.spatial())

    def interaction_kernel(self) -> SmearingFunction:
        """h(x) chi(t): kernel of V itself."""
        return SmearingFunction(Switch(self.eps, self.shape), self.spatial())

    def with_L(self, L: float | None) -> "InteractionSpec":
        return replace(self, L=L)


def generator_K(spec: InteractionSpec, order: int = 1) -> FormalSeries:
    """K as a series of word sums: 0 + lambda H(h chi'_-)."""
    if order >= 2:
        raise CapacityError("K beyond first order needs the order-2 Bogoliubov map, which is out of scope")
    return FormalSeries((WordSum.zero(), WordSum.density(spec.generator_kernel())), order)


def shift_integrated(kernel: SmearingFunction, a: complex, b: complex) -> SmearingFunction:
    """Kernel of int_a^b ds alpha_s(H(kernel))."""
    return replace(kernel, time=ShiftIntegral(kernel.time, complex(a), complex(b)))


def _node_word(kernel: SmearingFunction, times) -> tuple:
    return tuple(Density(kernel.translate(complex(t))) for t in times)


def _check_order(N: int, cap: int, what: str):
    if N < 0:
        raise DomainError("order must be >= 0")
    if N > cap:
        raise CapacityError(f"{what} is implemented up to order {cap}")


def dyson_intertwiner(t: complex, spec: InteractionSpec, order: int = 2,
                      simplex_nodes: int = 16) -> FormalSeries:
    """U_V(t) = 1 + sum_n i^n int_{0<t_1<...<t_n<t} alpha_{t_1}(K) * ... * alpha_{t_n}(K).

    ``t`` may be complex (``U_V(i beta)`` enters the interacting KMS state).
    """
    _check_order(order, MAX_DYSON_ORDER, "the Dyson intertwiner")
    t = complex(t)
    kernel = spec.generator_kernel()
    coeffs = [WordSum.one()]
    for n in range(1, order + 1):
        if t == 0:
            coeffs.append(WordSum.zero())
        elif n == 1:
            coeffs.append(WordSum.density(shift_integrated(kernel, 0, t), coefficient=1j))
        else:
            pts, wts = SimplexQuadrature(n, simplex_nodes).rule(t)
            terms = tuple(Term(KernelValue((1j) ** n * complex(w)), _node_word(kernel, p))
                          for p, w in zip(pts, wts))
            coeffs.append(WordSum(terms))
    return FormalSeries(tuple(coeffs), order)


def _as_words(A) -> WordSum:
    return A if isinstance(A, WordSum) else from_observable(A)


def perturbed_evolution(A, t: float, spec: InteractionSpec, order: int = 2,
                        simplex_nodes: int = 16) -> FormalSeries:
    """alpha_t^V(A) = alpha_t(A) + sum_n i^n int_{tS_n} [K_{t_1}, [..., [K_{t_n}, alpha_t(A)]...]]."""
    _check_order(order, MAX_DYSON_ORDER, "the perturbed evolution")
    At = _as_words(A).translate(t)
    kernel = spec.generator_kernel()
    coeffs = [At]
    for n in range(1, order + 1):
        if t == 0:
            coeffs.append(WordSum.zero())
            continue
        if n == 1:
            K = WordSum.density(shift_integrated(kernel, 0, t))
            coeffs.append(K.commutator(At).scale(1j))
            continue
        pts, wts = SimplexQuadrature(n, simplex_nodes).rule(t)
        acc = WordSum.zero()
        for p, w in zip(pts, wts):
            nested = At
            for tj in reversed(p):
                nested = WordSum.density(kernel.translate(complex(tj))).commutator(nested)
            acc = acc + nested.scale((1j) ** n * complex(w))
        coeffs.append(acc)
    return FormalSeries(tuple(coeffs), order)


def _connected_with(ev: WickEvaluator, A: WordSum, extra: tuple) -> KernelValue:
    total = KernelValue(0.0)
    for term in A.terms:
        if not term.factors:
            continue  # the unit is uncorrelated with everything
        total = total + ev.term_value(Term(term.coefficient, term.factors + extra), connected=True)
    return total


def interacting_kms(A, spec: InteractionSpec, params: ThermalParams, order: int = 1,
                    quad: QuadratureSpec | None = None, simplex_nodes: int = 16,
                    evaluator: WickEvaluator | None = None) -> FormalSeries:
    """w^{beta,V}(A) = sum_n (-1)^n int_{beta S_n} w^c(A (x) alpha_{iu_1}K (x) ... (x) alpha_{iu_n}K)."""
    _check_order(order, MAX_KMS_ORDER, "the interacting KMS expansion")
    if params.vacuum:
        raise DomainError("the interacting KMS state needs a finite temperature")
    ev = evaluator or WickEvaluator(params, quad)
    W = _as_words(A)
    kernel = spec.generator_kernel()
    beta = params.beta
    coeffs = [ev.expectation(W)]
    if order >= 1:
        # int_0^beta du alpha_{iu} K = -i * int_0^{i beta} ds alpha_s K
        dens = Density(shift_integrated(kernel, 0, 1j * beta))
        coeffs.append(_connected_with(ev, W, (dens,)) * (-1) * (-1j))
    if order >= 2:
        if not spec.adiabatic:
            raise CapacityError("finite-L paths through two densities are out of scope; use L=None")
        pts, wts = SimplexQuadrature(2, simplex_nodes).rule(beta)
        acc = KernelValue(0.0)
        for p, w in zip(pts, wts):
            acc = acc + _connected_with(ev, W, _node_word(kernel, 1j * p)) * float(w)
        coeffs.append(acc)
    return FormalSeries(tuple(coeffs), order)


def adiabatic_interacting_kms_n1(A, spec: InteractionSpec, params: ThermalParams,
                                 quad: QuadratureSpec | None = None) -> KernelValue:
    """Order-lambda coefficient of the interacting KMS state with h == 1 (momentum collapse)."""
    W = _as_words(A)
    for term in W.terms:
        if len(term.factors) > 1 or any(not isinstance(f, Legs) or len(f.legs) != 2 for f in term.factors):
            raise ConfigurationError("adiabatic n=1 evaluation needs a product of two linear fields")
    return interacting_kms(W, spec.with_L(None), params, 1, quad)[1]


def imaginary_time_weight(nu, beta: float):
    """int_0^beta dv (beta - v) exp(-nu v), the ordered-simplex weight of a bubble."""
    nu = np.asarray(nu, dtype=complex)
    x = nu * beta
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    big = (xs + np.expm1(-xs)) / xs**2
    series = 0.5 - x / 6 + x**2 / 24 - x**3 / 120
    return beta**2 * np.where(small, series, big)


def relative_entropy(spec: InteractionSpec, params: ThermalParams, order: int = 2,
                     quad: QuadratureSpec | None = None) -> FormalSeries:
    """S(w^beta | w^{beta,V}) = -beta w(K) - log w(U_V(i beta)) up to lambda^2.

    With K normal ordered the first two orders vanish and
    S_2 = -int_{0<u_1<u_2<beta} w(alpha_{iu_1}H * alpha_{iu_2}H) = -(1/2) bubble weighted
    by :func:`imaginary_time_weight`.
    """
    if order > 2:
        raise CapacityError("relative entropy is implemented up to order 2")
    if spec.adiabatic:
        raise DomainError("the relative entropy diverges with the volume in the adiabatic limit")
    if params.vacuum:
        raise DomainError("relative entropy needs a finite temperature")
    kernel = spec.generator_kernel()
    coeffs = [KernelValue(0.0), KernelValue(0.0)]
    if order == 2:
        bare = momentum.bubble_value(kernel, kernel, params, quad,
                                     weight=lambda nu: imaginary_time_weight(nu, params.beta))
        coeffs.append(bare * -0.5)
    return FormalSeries(tuple(coeffs), order)
