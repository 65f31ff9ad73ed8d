# tests/test_schemas.py

import pytest
from pydantic import ValidationError

from ssvlab.core.grids import Grid1D, Grid2D
from ssvlab.schemas.experiment import (
    EvalGridSpec,
    ExperimentConfig,
    InitialCondition,
    SystemTag,
    TargetSource,
    TimeSampling,
)
from ssvlab.schemas.network import ArchTag
from ssvlab.schemas.solver import BurgersScheme


def test_ns_defaults_fill_in():
    cfg = ExperimentConfig.model_validate({"SYSTEM": "NS2D"})
    assert cfg.system == SystemTag.NS2D
    assert cfg.t_max == 0.3 and cfg.batch == 4096
    assert cfg.time_sampling == TimeSampling.LOG_UNIFORM
    assert cfg.initial == InitialCondition.TWO_GAUSSIANS
    assert cfg.input_dim == 3
    assert len(cfg.eval_times) == 48
    assert cfg.eval_times[0] == pytest.approx(0.3) and cfg.eval_times[-1] == pytest.approx(5.0)
    assert cfg.solver_config().grid == Grid2D(n=256, half_width=20.0)


def test_burgers_defaults_fill_in():
    cfg = ExperimentConfig.model_validate({"system": "burgers"})
    assert cfg.t_max == 0.5 and cfg.batch == 2048
    assert cfg.time_sampling == TimeSampling.UNIFORM
    assert cfg.scheme == BurgersScheme.COLE_HOPF_EXACT
    assert cfg.triptych_times == [1.0, 1.5, 2.0, 2.5]
    assert cfg.solver_config().grid == Grid1D(n=2048, x_min=-15.0, x_max=15.0)
    assert cfg.input_dim == 2


def test_string_values_are_coerced():
    cfg = ExperimentConfig.model_validate({
        "SYSTEM": "burgers",
        "ARCH": "FCN",
        "c": "4",
        "STEPS": "10",
        "TRIPTYCH_TIMES": "1.0, 2.0",
        "TARGET_SOURCE": "cole_hopf",
    })
    assert cfg.arch == ArchTag.FCN
    assert cfg.C == 4.0 and cfg.steps == 10
    assert cfg.triptych_times == [1.0, 2.0]
    assert cfg.target_source == TargetSource.COLE_HOPF


@pytest.mark.parametrize(
    "overrides",
    [
        {"system": "ns2d", "unknown_key": "1"},
        {"system": "ns2d", "t_min": "0.5", "t_max": "0.3"},
        {"system": "ns2d", "target_source": "cole_hopf"},
        {"system": "ns2d", "initial": "bipolar_box"},
        {"system": "burgers", "initial": "lamb_oseen"},
        {"system": "burgers", "eval_times_stop": "6"},
        {"system": "ns2d", "n": "255"},
        {"system": "ns2d", "C": "0"},
        {"system": "heat"},
    ],
)
def test_invalid_configs_rejected(overrides):
    with pytest.raises(ValidationError):
        ExperimentConfig.model_validate(overrides)


def test_hyperparameters_exclude_artifacts():
    cfg = ExperimentConfig.model_validate({"system": "ns2d", "label": "x", "out_dir": "runs/a"})
    hyper = cfg.hyperparameters()
    assert "label" not in hyper and "out_dir" not in hyper
    assert hyper["seed"] == 0


def test_eval_grid_spec_from_config():
    cfg = ExperimentConfig.model_validate({"system": "burgers", "eval_times_count": "1"})
    spec = EvalGridSpec.from_config(cfg)
    assert spec.times == [0.5]
    assert spec.resolution == 2048
    with pytest.raises(ValidationError):
        EvalGridSpec(resolution=8)
