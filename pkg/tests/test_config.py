"""Config parsing and the variant table."""

import pytest

from sympmor.config import VARIANTS, RunConfig, load_config
from sympmor.errors import ConfigError
from sympmor.network import LossKind
from sympmor.stiefel import MetricKind, TransportKind


def test_variant_table_shape():
    assert set(VARIANTS) == {f"V{i}" for i in range(1, 11)}
    # V1 is the only non-epochwise variant; V1/V2 are unnormalized
    assert VARIANTS["V1"][0] is False
    assert all(VARIANTS[f"V{i}"][0] for i in range(2, 11))
    assert not VARIANTS["V1"][1] and not VARIANTS["V2"][1]
    # exactly V4 and V10 use the scaled-MSE loss
    mse = {k for k, v in VARIANTS.items() if v[2] is LossKind.ScaledMSE}
    assert mse == {"V4", "V10"}
    # V1-V4 are baseline runs, V5 plain direct, V6-V10 direct with decay
    for k in ("V1", "V2", "V3", "V4"):
        assert VARIANTS[k][3] == "homogeneous"
    assert VARIANTS["V5"][3] == "stiefel"
    for k in ("V6", "V7", "V8", "V9", "V10"):
        assert VARIANTS[k][3] == "stiefel_decay"


def test_apply_variant():
    cfg = RunConfig(params=[0.5]).apply_variant("V9")
    assert cfg.metric is MetricKind.Euclidean
    assert cfg.transport is TransportKind.Differential
    assert cfg.optimizer == "stiefel_decay"
    assert cfg.loss is LossKind.Relative
    assert cfg.epochwise and cfg.normalized
    assert cfg.variant == "V9"
    cfg.apply_variant("V1")
    assert not cfg.epochwise and not cfg.normalized
    # V1 leaves metric/transport untouched (baseline optimizer ignores them)
    assert cfg.metric is MetricKind.Euclidean
    with pytest.raises(ConfigError):
        cfg.apply_variant("V11")


def test_validate():
    with pytest.raises(ConfigError):
        RunConfig(params=[]).validate()
    with pytest.raises(ConfigError):
        RunConfig(model="heat", params=[1.0]).validate()
    with pytest.raises(ConfigError):
        RunConfig(model="wave", params=[1.0], t1=2.0).validate()
    with pytest.raises(ConfigError):
        RunConfig(params=[1.0], optimizer="sgd").validate()
    cfg = RunConfig(model="sg_single_soliton", params=[0.5],
                    a=-10.0, b=10.0).validate()
    assert cfg.model == "sg_single_soliton"


def test_load_config_full(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(
        "# training run\n"
        "model = wave\n"
        "N = 16\n"
        "n_range = 2, 4\n"
        "mu_list = 0.4166666 0.5 0.6\n"
        "testing = 0.45\n"
        "n_epochs = 5\n"
        "batch_size = 16\n"
        "time_steps = 25\n"
        "loss = relative\n"
        "optimizer = stiefel_decay\n"
        "metric = euclidean\n"
        "transport = differential\n"
        "eta = 0.01\n"
        "seed = 3\n"
    )
    cfg = load_config(p)
    assert cfg.N == 16 and cfg.n_range == [2, 4]
    assert cfg.params == pytest.approx([0.4166666, 0.5, 0.6])
    assert cfg.testing_params == [0.45]
    assert cfg.loss is LossKind.Relative
    assert cfg.metric is MetricKind.Euclidean
    assert cfg.transport is TransportKind.Differential
    assert cfg.eta == 0.01 and cfg.seed == 3


def test_load_config_variant_and_linspace(tmp_path):
    p = tmp_path / "run.cfg"
    p.write_text(
        "variant = V6\n"
        "model = wave\n"
        "mu_left = 0.4\n"
        "mu_right = 0.6\n"
        "n_params = 5\n"
    )
    cfg = load_config(p)
    assert cfg.variant == "V6"
    assert cfg.optimizer == "stiefel_decay"
    assert len(cfg.params) == 5
    assert cfg.params[0] == pytest.approx(0.4)
    assert cfg.params[-1] == pytest.approx(0.6)


def test_load_config_rejects_bad_lines(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("model wave\n")
    with pytest.raises(ConfigError):
        load_config(p)
    p.write_text("model = wave\nwibble = 3\nmu_list = 0.5\n")
    with pytest.raises(ConfigError):
        load_config(p)
