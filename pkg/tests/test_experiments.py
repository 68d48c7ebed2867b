import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gelu_lab.activations import Elu, Gelu, Relu
from gelu_lab.data import DataError
from gelu_lab.experiments import (
    ConfigError,
    ExperimentConfig,
    LossCurve,
    best_learning_rate,
    emit_activation_table,
    format_table,
    load_data,
    read_csv,
    run_autoencoder,
    run_classification,
    run_lr_sweep,
    run_soi_demo,
    write_csv,
)
from gelu_lab.nn import DenseNet, evaluate

TINY = dict(synthetic=True, subset=60, val_subset=20, epochs=2, widths=[8, 8])


def test_config_defaults():
    clf = ExperimentConfig()
    assert clf.layer_widths() == [784] + [128] * 7 + [10]
    assert clf.effective_batch_size == 128 and clf.effective_val_subset == 2000
    ae = ExperimentConfig(task="ae")
    assert ae.effective_batch_size == 64
    assert ae.hidden_widths() == [250, 125, 63, 8, 63, 125, 250]
    assert ExperimentConfig(task="ae", width_div=1).hidden_widths() == [1000, 500, 250, 30, 250, 500, 1000]


@pytest.mark.parametrize(
    "bad",
    [
        dict(runs=0),
        dict(epochs=0),
        dict(task="ae", widths=[250, 0, 250]),
        dict(activation="soi", dropout=0.5),
        dict(task="soi-demo", activation="gelu"),
        dict(dropout=1.0),
        dict(activation="elu", alpha=-1.0),
        dict(task="cifar"),
        dict(lr=-1e-3),
    ],
)
def test_config_rejects(bad):
    with pytest.raises(ConfigError):
        ExperimentConfig(**bad)


def test_soi_dropout_message():
    with pytest.raises(ConfigError, match="SOI runs use no dropout"):
        ExperimentConfig(task="soi-demo", activation="soi", dropout=0.5)


@given(
    st.builds(
        ExperimentConfig,
        task=st.sampled_from(["clf", "ae"]),
        activation=st.sampled_from(["relu", "elu", "gelu", "gelu-tanh", "cauchylu", "lalu"]),
        dropout=st.floats(0, 0.9),
        lr=st.floats(0, 1),
        epochs=st.integers(1, 100),
        runs=st.integers(1, 9),
        seed=st.integers(0, 2**64 - 1),
        widths=st.lists(st.integers(1, 2000), max_size=5),
        synthetic=st.booleans(),
        mnist_dir=st.text(max_size=10),
    )
)
def test_config_round_trip(cfg):
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_config_file_round_trip(tmp_path):
    cfg = ExperimentConfig(task="ae", lr_sweep=[1e-3, 1e-5], seed=7, widths=[3, 2, 3])
    cfg.save(tmp_path / "c.json")
    assert ExperimentConfig.load(tmp_path / "c.json") == cfg
    with pytest.raises(ConfigError, match="unknown config keys"):
        ExperimentConfig.from_dict({"bogus": 1})


def test_median_rules():
    c = LossCurve()
    for run, v in enumerate([5.0, 1.0, 3.0, 4.0, 2.0]):
        c.add(run, 1, "train", v)
    assert c.median("train", 1) == 3.0
    c.add(5, 1, "train", 0.5)
    assert c.median("train", 1) == 2.0  # lower median of 0.5,1,2,3,4,5
    with pytest.raises(ValueError):
        c.add(0, 1, "train", 9.0)
    with pytest.raises(ValueError):
        c.add(0, 1, "test", 9.0)


def test_csv_shapes(tmp_path):
    write_csv(LossCurve(), tmp_path / "empty.csv")
    assert (tmp_path / "empty.csv").read_text() == "run,epoch,split,loss\n"
    c = LossCurve([(0, 2, "val", 0.1), (0, 1, "train", 1 / 3), (0, 1, "val", 0.2), (0, 2, "train", 0.05)])
    write_csv(c, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[1:] == [
        "0,1,train,0.33333333333333331",
        "0,1,val,0.20000000000000001",
        "0,2,train,0.050000000000000003",
        "0,2,val,0.10000000000000001",
    ]
    assert read_csv(tmp_path / "c.csv").rows() == c.rows()
    with pytest.raises(OSError, match="cannot write"):
        write_csv(c, tmp_path / "missing" / "c.csv")


def test_classification_structure():
    curve = run_classification(ExperimentConfig(**{**TINY, "epochs": 1}))
    buf = io.StringIO()
    write_csv(curve, buf)
    assert buf.getvalue().count("\n") == 3  # header + train + val


def test_median_column_matches_order_statistic():
    curve = run_classification(ExperimentConfig(**TINY, runs=5, activation="relu"))
    for epoch in (1, 2):
        vals = sorted(curve.losses("train", epoch))
        assert len(vals) == 5 and curve.median("train", epoch) == vals[2]


def test_runs_are_reproducible_and_seed_sensitive():
    a = run_classification(ExperimentConfig(**TINY, runs=2, dropout=0.5))
    b = run_classification(ExperimentConfig(**TINY, runs=2, dropout=0.5))
    c = run_classification(ExperimentConfig(**TINY, runs=2, dropout=0.5, seed=1))
    assert a.rows() == b.rows()
    assert a.rows() != c.rows()


def test_missing_mnist_lists_paths(tmp_path, monkeypatch):
    monkeypatch.delenv("GELU_LAB_MNIST_DIR", raising=False)
    with pytest.raises(DataError, match="train-images-idx3-ubyte"):
        load_data(ExperimentConfig(mnist_dir=str(tmp_path)))


def test_autoencoder_zero_lr_is_flat():
    cfg = ExperimentConfig(task="ae", lr=0.0, synthetic=True, subset=64, val_subset=16,
                           epochs=3, widths=[16, 4, 16], batch_size=16)
    curve = run_autoencoder(cfg)
    val = curve.medians("val")
    assert val[0] == val[1] == val[2]
    train = curve.medians("train")
    assert train == pytest.approx([train[0]] * 3, rel=1e-12)


def test_lr_sweep_and_best():
    cfg = ExperimentConfig(task="ae", synthetic=True, subset=64, val_subset=16, epochs=2,
                           widths=[16, 4, 16], lr_sweep=[1e-2, 0.0])
    curves = run_lr_sweep(cfg, run_autoencoder)
    assert set(curves) == {1e-2, 0.0}
    assert best_learning_rate(curves) == 1e-2


def test_soi_demo_behaviour():
    cfg = ExperimentConfig(task="soi-demo", activation="soi", **TINY)
    train, val = load_data(cfg)
    net = DenseNet.build(cfg.layer_widths(), "soi", seed=0)
    assert evaluate(net, val) == evaluate(net, val)
    assert run_soi_demo(cfg).rows() == run_soi_demo(cfg).rows()
    with pytest.raises(ConfigError):
        run_soi_demo(ExperimentConfig(**TINY))


def test_activation_table():
    kinds = [Gelu(), Relu(), Elu(1.0)]
    rows = emit_activation_table(-4.0, 4.0, 0.5, kinds)
    assert len(rows) == math.floor(8.0 / 0.5) + 1
    assert rows[8] == [0.0, 0.0, 0.0, 0.0]
    assert rows[6][0] == -1.0 and rows[6][3] == pytest.approx(-0.6321205588285577, rel=1e-15)
    text = format_table(rows, kinds)
    assert text.splitlines()[0] == "x\tgelu\trelu\telu"
    assert np.isclose(float(text.splitlines()[7].split("\t")[3]), -0.6321205588285577)
