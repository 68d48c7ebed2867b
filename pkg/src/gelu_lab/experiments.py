"""Experiment configurations, runners and their CSV/TSV outputs."""

import csv
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from gelu_lab import activations
from gelu_lab.data import DataError, load_mnist, standardize, synthetic_blobs
from gelu_lab.nn import IDENTITY, AdamState, DenseNet, evaluate, train_epoch
from gelu_lab.rng import stream

log = logging.getLogger(__name__)

TASKS = ("clf", "ae", "soi-demo")
ACTIVATIONS = ("relu", "elu", "gelu", "gelu-tanh", "cauchylu", "lalu", "soi")
AE_LADDER = (1000, 500, 250, 30, 250, 500, 1000)
CLF_HIDDEN = (128,) * 7
N_PIXELS = 784
N_CLASSES = 10
MNIST_FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}
SYNTHETIC_SEPARATION = 3.0


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    task: str = "clf"
    activation: str = "gelu"
    alpha: float = 1.0
    mu: float = 0.0
    sigma: float = 1.0
    dropout: float = 0.0
    lr: float = 1e-3
    lr_sweep: list = field(default_factory=list)
    epochs: int = 10
    batch_size: int = 0  # 0: 128 for classifiers, 64 for the autoencoder
    runs: int = 1
    seed: int = 0
    widths: list = field(default_factory=list)  # hidden widths; empty: task default
    width_div: int = 4
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    mnist_dir: str = ""
    synthetic: bool = False
    subset: int = 8000
    val_subset: int = 0  # 0: subset // 4
    out: str = ""

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.activation not in ACTIVATIONS:
            raise ConfigError(f"activation must be one of {ACTIVATIONS}, got {self.activation!r}")
        if self.task == "soi-demo" and self.activation != "soi":
            raise ConfigError("soi-demo runs use --activation soi")
        if self.activation == "soi" and self.dropout != 0:
            raise ConfigError("SOI runs use no dropout")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")
        if self.lr < 0 or any(lr < 0 for lr in self.lr_sweep):
            raise ConfigError("learning rates must be non-negative")
        for name in ("epochs", "runs", "width_div", "subset"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.batch_size < 0 or self.val_subset < 0 or self.seed < 0:
            raise ConfigError("batch_size, val_subset and seed must be non-negative")
        if any(int(w) != w or w < 1 for w in self.widths):
            raise ConfigError(f"layer widths must be positive integers, got {self.widths}")
        try:
            self.make_activation()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def make_activation(self):
        if self.activation == "soi":
            return "soi"
        return activations.from_name(self.activation, alpha=self.alpha, mu=self.mu, sigma=self.sigma)

    @property
    def effective_batch_size(self):
        return self.batch_size or (64 if self.task == "ae" else 128)

    @property
    def effective_val_subset(self):
        return self.val_subset or max(1, self.subset // 4)

    def hidden_widths(self):
        if self.widths:
            return [int(w) for w in self.widths]
        if self.task == "ae":
            return [max(1, math.ceil(w / self.width_div)) for w in AE_LADDER]
        return list(CLF_HIDDEN)

    def layer_widths(self):
        out = N_PIXELS if self.task == "ae" else N_CLASSES
        return [N_PIXELS, *self.hidden_widths(), out]

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path):
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc


class LossCurve:
    """Per-(run, epoch, split) loss records with median aggregation across runs.

    Medians use the lower middle element for even run counts.
    """

    SPLITS = ("train", "val")

    def __init__(self, records=None, label=""):
        self.records = {}
        self.label = label
        for run, epoch, split, loss in records or ():
            self.add(run, epoch, split, loss)

    def add(self, run, epoch, split, loss):
        if split not in self.SPLITS:
            raise ValueError(f"split must be train or val, got {split!r}")
        key = (int(run), int(epoch), split)
        if key in self.records:
            raise ValueError(f"duplicate record {key}")
        self.records[key] = float(loss)

    def rows(self):
        return [(*k, self.records[k]) for k in sorted(self.records)]

    def epochs(self):
        return sorted({e for _, e, _ in self.records})

    def losses(self, split, epoch):
        return [v for (r, e, s), v in sorted(self.records.items()) if s == split and e == epoch]

    def median(self, split, epoch):
        vals = sorted(self.losses(split, epoch))
        if not vals:
            raise KeyError(f"no {split} records at epoch {epoch}")
        return vals[(len(vals) - 1) // 2]

    def medians(self, split):
        return [self.median(split, e) for e in self.epochs()]

    def final_median(self, split):
        return self.medians(split)[-1]

    def __len__(self):
        return len(self.records)


def _write_rows(fh, curve):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["run", "epoch", "split", "loss"])
    for run, epoch, split, loss in curve.rows():
        w.writerow([run, epoch, split, f"{loss:.17g}"])


def write_csv(curve, path):
    """Write ``run,epoch,split,loss`` rows; losses carry 17 significant digits.

    ``path`` may also be an open text stream.
    """
    if hasattr(path, "write"):
        _write_rows(path, curve)
        return
    try:
        with open(path, "w", newline="") as fh:
            _write_rows(fh, curve)
    except OSError as exc:
        raise OSError(f"cannot write loss curve to {path}: {exc}") from exc


def read_csv(path):
    with open(path, newline="") as fh:
        return LossCurve(
            (int(r["run"]), int(r["epoch"]), r["split"], float(r["loss"]))
            for r in csv.DictReader(fh)
        )


def write_medians_csv(curve, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["epoch", "split", "median_loss"])
        for epoch in curve.epochs():
            for split in LossCurve.SPLITS:
                if curve.losses(split, epoch):
                    w.writerow([epoch, split, f"{curve.median(split, epoch):.17g}"])


def _mnist_paths(config):
    paths = {k: getattr(config, k) for k in MNIST_FILES}
    base = config.mnist_dir or os.environ.get("GELU_LAB_MNIST_DIR", "")
    if base:
        for key, stem in MNIST_FILES.items():
            if paths[key]:
                continue
            dotted = stem.replace("-idx", ".idx")
            for name in (stem, dotted, stem + ".gz", dotted + ".gz"):
                candidate = Path(base) / name
                if candidate.exists():
                    paths[key] = str(candidate)
                    break
    return paths


def load_data(config):
    """Standardized ``(train, val)`` datasets capped at the configured subset sizes."""
    n_train, n_val = config.subset, config.effective_val_subset
    if config.synthetic:
        per_class = max(1, math.ceil(n_train / N_CLASSES))
        train = synthetic_blobs(per_class, N_CLASSES, N_PIXELS, SYNTHETIC_SEPARATION,
                                stream(config.seed, "data", 0)).head(n_train)
        val = synthetic_blobs(max(1, math.ceil(n_val / N_CLASSES)), N_CLASSES, N_PIXELS,
                              SYNTHETIC_SEPARATION, stream(config.seed, "data", 1)).head(n_val)
    else:
        paths = _mnist_paths(config)
        missing = [k for k, v in paths.items() if not v or not Path(v).exists()]
        if missing:
            expected = ", ".join(f"--{k.replace('_', '-')} ({MNIST_FILES[k]})" for k in missing)
            raise DataError(f"MNIST files not found: {expected}; pass them, set --mnist-dir, "
                            "or use --synthetic")
        train = load_mnist(paths["train_images"], paths["train_labels"]).head(n_train)
        val = load_mnist(paths["test_images"], paths["test_labels"]).head(n_val)
    if config.task == "ae":
        train, val = train.as_reconstruction(), val.as_reconstruction()
    return standardize(train, val)


def _train_run(config, run, train, val, lr, curve):
    seed = config.seed + run
    hidden = config.make_activation()
    net = DenseNet.build(config.layer_widths(), hidden, IDENTITY, dropout=config.dropout, seed=seed)
    opt = AdamState(lr=lr)
    loss = "mse" if config.task == "ae" else "xent"
    for epoch in range(1, config.epochs + 1):
        tr = train_epoch(net, train, opt, stream(seed, "shuffle", epoch),
                         batch_size=config.effective_batch_size, loss=loss)
        va = evaluate(net, val, loss=loss)
        curve.add(run, epoch, "train", tr)
        curve.add(run, epoch, "val", va)
        log.info("%s run %d epoch %d: train %.6g val %.6g", curve.label, run, epoch, tr, va)


def _run(config, data=None, lr=None):
    train, val = data if data is not None else load_data(config)
    lr = config.lr if lr is None else lr
    curve = LossCurve(label=f"{config.task}/{config.activation}/lr={lr:g}")
    for run in range(config.runs):
        _train_run(config, run, train, val, lr, curve)
    return curve


def run_classification(config, data=None):
    """7x128 MLP classification curves; ``data`` overrides loading."""
    if config.task != "clf":
        raise ConfigError(f"run_classification needs task 'clf', got {config.task!r}")
    return _run(config, data)


def run_autoencoder(config, data=None, lr=None):
    if config.task != "ae":
        raise ConfigError(f"run_autoencoder needs task 'ae', got {config.task!r}")
    return _run(config, data, lr)


def run_soi_demo(config, data=None):
    """Classifier with SOI maps in every hidden position, GELU at evaluation."""
    if config.task != "soi-demo" or config.activation != "soi":
        raise ConfigError("run_soi_demo needs task 'soi-demo' with activation 'soi'")
    if config.dropout != 0:
        raise ConfigError("SOI runs use no dropout")
    return _run(config, data)


def run_lr_sweep(config, runner, data=None):
    """Run ``runner`` once per learning rate in ``config.lr_sweep``; returns ``{lr: curve}``."""
    data = data if data is not None else load_data(config)
    return {lr: runner(config, data=data, lr=lr) for lr in config.lr_sweep}


def best_learning_rate(curves):
    """Learning rate whose median final train loss is lowest (ties: first listed)."""
    return min(curves, key=lambda lr: curves[lr].final_median("train"))


def emit_activation_table(lo, hi, step, kinds):
    """Rows ``[x, f_1(x), ..., f_k(x)]`` on the inclusive grid."""
    xs = activations.grid(lo, hi, step)
    cols = [np.asarray(k.forward(xs), dtype=np.float64) for k in kinds]
    return [[float(x), *(float(c[i]) for c in cols)] for i, x in enumerate(xs)]


def format_table(rows, kinds):
    lines = ["\t".join(["x", *(k.name for k in kinds)])]
    lines += ["\t".join(f"{v:.17g}" for v in row) for row in rows]
    return "\n".join(lines) + "\n"
