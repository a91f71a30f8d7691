"""Experiment registry: id -> runner, config keys and the property being checked."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .algebra import Observable
from .config import RunConfig
from .experiments import (ExperimentReport, adiabatic_failure, clustering_decay, ergodic_growth,
                          first_order_stability, ness_kms_violation_check, ness_two_point_check,
                          return_to_equilibrium)
from .words import WordSum


@dataclass(frozen=True)
class Entry:
    id: str
    runner: Callable
    keys: tuple[str, ...]
    claim: str


def _context(run: RunConfig, exp, tol_scale: float):
    params = (exp.params or run.params).build()
    spec = (exp.spec or run.spec).build()
    return params, run.quad.build(tol_scale), spec


def _clustering(exp, params, quad, spec) -> ExperimentReport:
    A = Observable.field(exp.f.build())
    B = Observable.field(exp.g.build())
    return clustering_decay(A, B, exp.grid, params, quad)


def _pair(exp) -> WordSum:
    return WordSum.legs(exp.f.build(), exp.g.build())


def _stability(exp, params, quad, spec) -> ExperimentReport:
    return first_order_stability(_pair(exp), spec, exp.grid, params, quad)


def _return(exp, params, quad, spec) -> ExperimentReport:
    return return_to_equilibrium(_pair(exp), spec, exp.grid, params, 1, quad)


def _adiabatic(exp, params, quad, spec) -> ExperimentReport:
    return adiabatic_failure(exp.f.build(), exp.g.build(), spec, params, exp.LT_grid, quad)


def _growth(exp, params, quad, spec) -> ExperimentReport:
    return ergodic_growth(exp.f.build(), spec.with_L(None), params, exp.grid, tuple(exp.orders),
                          brute_nodes=exp.brute_nodes, quad=quad)


def _ness(exp, params, quad, spec) -> ExperimentReport:
    return ness_two_point_check(exp.f.build(), exp.g.build(), params, quad)


def _violation(exp, params, quad, spec) -> ExperimentReport:
    return ness_kms_violation_check(exp.f.build(), exp.g.build(), params, quad)


REGISTRY: dict[str, Entry] = {e.id: e for e in (
    Entry("clustering_decay", _clustering, ("f", "g", "grid"),
          "connected w(phi(f) * alpha_t phi(g)) decays like t^-3/2"),
    Entry("first_order_stability", _stability, ("f", "g", "grid"),
          "order-lambda ergodic response converges to the interacting KMS correction at finite L"),
    Entry("return_to_equilibrium", _return, ("f", "g", "grid"),
          "w o alpha^V_T -> w^V and w^V o alpha_T -> w at order lambda, finite L"),
    Entry("adiabatic_failure_w", _adiabatic, ("f", "g", "LT_grid"),
          "with h = 1 the ergodic mean of the first-order clustering defect is w(f, g) != 0"),
    Entry("ergodic_growth_Q", _growth, ("f", "grid", "orders", "brute_nodes"),
          "oscillation envelope of the n-th nested-commutator ergodic term in the adiabatic limit"),
    Entry("ness_two_point", _ness, ("f", "g"),
          "steady-state two-point defect equals beta * w"),
    Entry("ness_kms_violation", _violation, ("f", "g"),
          "the steady state violates the KMS condition"),
)}


def run_experiment(run: RunConfig, exp, tol_scale: float = 1.0) -> ExperimentReport:
    params, quad, spec = _context(run, exp, tol_scale)
    return REGISTRY[exp.id].runner(exp, params, quad, spec)


def listing() -> str:
    lines = []
    for e in REGISTRY.values():
        lines.append(f"{e.id}\n    keys: {', '.join(e.keys)} (optional: params, spec)\n    checks: {e.claim}")
    return "\n".join(lines)

