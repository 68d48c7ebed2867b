import json

import pytest

from gelu_lab.cli import main

SMALL = ["--synthetic", "--subset", "60", "--val-subset", "20", "--epochs", "2", "--widths", "8,8"]


def test_clf_to_stdout(capsys):
    assert main(["clf", *SMALL, "--epochs", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "run,epoch,split,loss"
    assert [line.split(",")[2] for line in out[1:]] == ["train", "val"]


def test_identical_flags_give_identical_bytes(tmp_path):
    for name in ("a.csv", "b.csv"):
        assert main(["clf", *SMALL, "--runs", "2", "--dropout", "0.5", "--out", str(tmp_path / name)]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_medians_file(tmp_path):
    out, med = tmp_path / "c.csv", tmp_path / "m.csv"
    assert main(["clf", *SMALL, "--runs", "3", "--out", str(out), "--median-out", str(med)]) == 0
    lines = med.read_text().splitlines()
    assert lines[0] == "epoch,split,median_loss" and len(lines) == 5


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    assert main(["clf", *SMALL, "--activation", "elu", "--save-config", str(cfg),
                 "--out", str(tmp_path / "x.csv")]) == 0
    saved = json.loads(cfg.read_text())
    assert saved["activation"] == "elu" and saved["widths"] == [8, 8]
    assert main(["clf", "--config", str(cfg), "--epochs", "1", "--out", str(tmp_path / "y.csv")]) == 0
    assert len((tmp_path / "y.csv").read_text().splitlines()) == 3


def test_lr_sweep_writes_one_file_per_rate(tmp_path, capsys):
    out = tmp_path / "ae.csv"
    argv = ["ae", *SMALL, "--widths", "8,4,8", "--lr-sweep", "1e-3,1e-4", "--out", str(out)]
    assert main(argv) == 0
    assert (tmp_path / "ae_lr0.001.csv").exists() and (tmp_path / "ae_lr0.0001.csv").exists()
    assert "best lr" in capsys.readouterr().err


def test_soi_demo_runs(tmp_path):
    assert main(["soi-demo", *SMALL, "--out", str(tmp_path / "s.csv")]) == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["soi-demo", *SMALL, "--dropout", "0.5"],
        ["clf", *SMALL, "--runs", "0"],
        ["ae", *SMALL, "--widths", "8,0,8"],
        ["clf", *SMALL, "--lr-sweep", "1e-3"],
        ["clf", "--config", "/nonexistent/cfg.json"],
    ],
)
def test_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "config error" in capsys.readouterr().err


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["clf", "--activation", "lrelu"])
    assert exc.value.code == 2


def test_missing_data_exit_3(tmp_path, monkeypatch, capsys):
    monkeypatch.delenv("GELU_LAB_MNIST_DIR", raising=False)
    assert main(["clf", "--mnist-dir", str(tmp_path)]) == 3
    assert "t10k-labels-idx1-ubyte" in capsys.readouterr().err


def test_corrupt_data_exit_3(tmp_path):
    for name in ("train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                 "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"):
        (tmp_path / name).write_bytes(b"\x00\x00\x08\x01\x00")
    assert main(["clf", "--mnist-dir", str(tmp_path)]) == 3


def test_plot_act(capsys):
    assert main(["plot-act", "--lo", "-1", "--hi", "1", "--step", "0.5"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x\tgelu\trelu\telu"
    assert len(lines) == 6
    assert lines[3].split("\t") == ["0", "0", "0", "0"]
    assert float(lines[1].split("\t")[3]) == pytest.approx(-0.6321205588285577)


def test_plot_act_kinds_to_file(tmp_path):
    out = tmp_path / "t.tsv"
    assert main(["plot-act", "--kinds", "cauchylu,lalu,gelu-tanh", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "x\tcauchylu\tlalu\tgelu-tanh"


def test_approx_scan(capsys):
    assert main(["approx-scan"]) == 0
    err, at = capsys.readouterr().out.splitlines()[1].split("\t")
    assert float(err) == pytest.approx(4.732355179519e-4, abs=1e-15)
