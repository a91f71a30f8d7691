"""Run configuration schema (YAML), validated with pydantic; unknown keys are rejected.

All lengths and times are in units of 1/m.
"""
from __future__ import annotations

from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .params import QuadratureSpec, ThermalParams
from .perturbation import InteractionSpec
from .profiles import GaussianSpace, GaussianTimeDerivative, SmearingFunction, gaussian_packet


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ParamsConfig(_Strict):
    m: float = Field(1.0, gt=0)
    beta: Optional[float] = Field(1.0, description="inverse temperature; null for the vacuum")

    @field_validator("beta")
    @classmethod
    def _positive_beta(cls, v):
        if v is not None and not v > 0:
            raise ValueError("beta must be > 0 (use null for the vacuum)")
        return v

    def build(self) -> ThermalParams:
        if self.beta is None:
            return ThermalParams.vacuum_state(self.m)
        return ThermalParams(self.m, self.beta)


class QuadConfig(_Strict):
    rel_tol: float = Field(1e-8, gt=0)
    abs_tol: float = Field(1e-14, gt=0)
    oscillatory_method: Literal["adaptive", "filon"] = "adaptive"

    def build(self, tol_scale: float = 1.0) -> QuadratureSpec:
        base = QuadratureSpec(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                              oscillatory_method=self.oscillatory_method)
        return base.scaled(tol_scale) if tol_scale != 1.0 else base


class SpecConfig(_Strict):
    eps: float = Field(1.0, gt=0)
    shape: Literal["smoothstep1", "smoothstep2", "smoothstep3"] = "smoothstep2"
    L: Optional[float] = Field(10.0, description="spatial cutoff scale; null for the adiabatic limit")

    @field_validator("L")
    @classmethod
    def _positive_L(cls, v):
        if v is not None and not v > 0:
            raise ValueError("L must be > 0 when finite")
        return v

    def build(self) -> InteractionSpec:
        return InteractionSpec(eps=self.eps, shape=self.shape, L=self.L)


class PacketConfig(_Strict):
    t0: float = 0.0
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    sigma_t: float = Field(0.5, ge=0)
    sigma_x: float = Field(1.0, ge=0)
    kind: Literal["gaussian", "gaussian_derivative"] = "gaussian"

    def build(self) -> SmearingFunction:
        if self.kind == "gaussian":
            return gaussian_packet(self.t0, self.x0, self.sigma_t, self.sigma_x)
        if not self.sigma_t > 0:
            raise ValueError("a Gaussian-derivative profile needs sigma_t > 0")
        return SmearingFunction(GaussianTimeDerivative(self.t0, self.sigma_t),
                                GaussianSpace(self.x0, self.sigma_x))


class _ExperimentBase(_Strict):
    """Per-experiment overrides of the global ``params`` and ``spec`` sections."""

    params: Optional[ParamsConfig] = None
    spec: Optional[SpecConfig] = None


class ClusteringConfig(_ExperimentBase):
    id: Literal["clustering_decay"]
    f: PacketConfig = PacketConfig()
    g: PacketConfig = PacketConfig(x0=(0.5, 0.0, 0.0))
    grid: list[float] = Field([5, 7, 10, 14, 20, 28, 35, 50], min_length=1)


class StabilityConfig(_ExperimentBase):
    id: Literal["first_order_stability", "return_to_equilibrium"]
    f: PacketConfig = PacketConfig()
    g: PacketConfig = PacketConfig()
    grid: list[float] = Field([1, 5, 10, 20, 30, 50], min_length=1)


class AdiabaticConfig(_ExperimentBase):
    id: Literal["adiabatic_failure_w"]
    f: PacketConfig = PacketConfig()
    g: PacketConfig = PacketConfig()
    LT_grid: list[tuple[float, float]] = Field([(10.0, 50.0), (20.0, 100.0)], min_length=1)


class GrowthConfig(_ExperimentBase):
    id: Literal["ergodic_growth_Q"]
    f: PacketConfig = PacketConfig(kind="gaussian_derivative")
    grid: list[float] = Field([10, 14, 20, 28, 40, 56, 80, 113, 160, 200], min_length=1)
    orders: list[Literal[1, 2, 3]] = Field([1, 3], min_length=1)
    brute_nodes: int = Field(40, ge=4, le=64)


class NessConfig(_ExperimentBase):
    id: Literal["ness_two_point", "ness_kms_violation"]
    f: PacketConfig = PacketConfig()
    g: PacketConfig = PacketConfig(t0=1.5, x0=(0.5, 0.0, 0.0))


ExperimentConfig = Annotated[
    Union[ClusteringConfig, StabilityConfig, AdiabaticConfig, GrowthConfig, NessConfig],
    Field(discriminator="id"),
]


class RunConfig(_Strict):
    params: ParamsConfig = ParamsConfig()
    quad: QuadConfig = QuadConfig()
    spec: SpecConfig = SpecConfig()
    out_dir: str = "thermalkms-out"
    experiments: list[ExperimentConfig] = []

    @model_validator(mode="after")
    def _unique_ids(self):
        ids = [e.id for e in self.experiments]
        if len(ids) != len(set(ids)):
            raise ValueError("each experiment id may appear at most once")
        return self


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a YAML run configuration (pydantic errors propagate)."""
    text = Path(path).read_text()
    data = yaml.safe_load(text) or {}
    if not isinstance(data, dict):
        raise ValueError("the configuration must be a mapping")
    return RunConfig.model_validate(data)


def dump_config(cfg: RunConfig) -> str:
    """YAML echo of the resolved configuration; parses back to an equal RunConfig."""
    return yaml.safe_dump(cfg.model_dump(mode="json"), sort_keys=False)
