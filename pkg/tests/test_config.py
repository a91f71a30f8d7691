import pytest
import yaml
from hypothesis import given, strategies as st
from pydantic import ValidationError

from thermalkms.config import (GrowthConfig, PacketConfig, ParamsConfig, QuadConfig, RunConfig, SpecConfig,
                               dump_config, load_config)
from thermalkms.profiles import GaussianTimeDerivative


def write(tmp_path, text):
    p = tmp_path / "run.yaml"
    p.write_text(text)
    return p


def test_defaults_and_builders():
    cfg = RunConfig()
    assert cfg.experiments == [] and cfg.params.build().beta == 1.0
    assert ParamsConfig(beta=None).build().vacuum
    assert SpecConfig(L=None).build().adiabatic
    assert QuadConfig().build(10.0).rel_tol == pytest.approx(1e-7)
    assert isinstance(GrowthConfig(id="ergodic_growth_Q").f.build().time, GaussianTimeDerivative)
    with pytest.raises(ValueError):
        PacketConfig(kind="gaussian_derivative", sigma_t=0.0).build()


@pytest.mark.parametrize("text", [
    "params: {beta: -1}\n",
    "params: {m: 0}\n",
    "spec: {L: 0}\n",
    "spec: {shape: cubic}\n",
    "bogus: 1\n",
    "experiments: [{id: not_an_experiment}]\n",
    "experiments: [{id: ness_two_point}, {id: ness_two_point}]\n",
    "experiments: [{id: ness_two_point, grid: [1, 2]}]\n",
    "experiments: [{id: clustering_decay, grid: []}]\n",
    "experiments: [{id: ergodic_growth_Q, orders: [4]}]\n",
])
def test_invalid_configs_are_rejected(tmp_path, text):
    with pytest.raises(ValidationError):
        load_config(write(tmp_path, text))


def test_non_mapping_and_empty_files(tmp_path):
    with pytest.raises(ValueError):
        load_config(write(tmp_path, "- 1\n- 2\n"))
    assert load_config(write(tmp_path, "")).experiments == []


@given(st.floats(0.1, 10), st.one_of(st.none(), st.floats(0.1, 10)), st.one_of(st.none(), st.floats(1, 50)),
       st.lists(st.floats(1, 200), min_size=1, max_size=5))
def test_round_trip(m, beta, L, grid):
    cfg = RunConfig.model_validate({
        "params": {"m": m, "beta": beta}, "spec": {"L": L},
        "experiments": [{"id": "clustering_decay", "grid": grid},
                        {"id": "adiabatic_failure_w", "LT_grid": [[20.0, 100.0]], "params": {"beta": 2.0}},
                        {"id": "ness_kms_violation"}],
    })
    again = RunConfig.model_validate(yaml.safe_load(dump_config(cfg)))
    assert again == cfg


def test_shipped_standard_config_is_valid():
    from pathlib import Path
    cfg = load_config(Path(__file__).parents[1] / "configs" / "standard.yaml")
    assert {e.id for e in cfg.experiments} == {
        "clustering_decay", "first_order_stability", "return_to_equilibrium", "adiabatic_failure_w",
        "ergodic_growth_Q", "ness_two_point", "ness_kms_violation"}
