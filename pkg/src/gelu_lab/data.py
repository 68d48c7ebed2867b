"""MNIST IDX parsing, standardization and synthetic stand-in data."""

import gzip
import struct
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
GZIP_MAGIC = b"\x1f\x8b"


class DataError(ValueError):
    """Malformed or missing data files."""


@dataclass(frozen=True)
class Dataset:
    """``features`` is n x d; ``targets`` holds class indices or, for
    reconstruction, the feature matrix itself."""

    features: np.ndarray
    targets: np.ndarray
    mean: float = 0.0
    std: float = 1.0

    def __post_init__(self):
        if len(self.features) != len(self.targets):
            raise DataError(f"{len(self.features)} examples but {len(self.targets)} targets")

    def __len__(self):
        return len(self.features)

    def head(self, n):
        return replace(self, features=self.features[:n], targets=self.targets[:n])

    def as_reconstruction(self):
        return replace(self, targets=self.features)


def _maybe_gunzip(data):
    data = bytes(data)
    return gzip.decompress(data) if data[:2] == GZIP_MAGIC else data


def _header(data, fmt, magic, kind):
    size = struct.calcsize(fmt)
    if len(data) < 4:
        raise DataError(f"unexpected EOF at byte {len(data)}")
    if struct.unpack(">I", data[:4])[0] != magic:
        raise DataError(f"not an IDX{kind} file")
    if len(data) < size:
        raise DataError(f"unexpected EOF at byte {len(data)}")
    return struct.unpack(fmt, data[:size])[1:], size


def parse_idx_images(data):
    """IDX3 image bytes (raw or gzip) to an ``n x (rows*cols)`` array in [0, 1]."""
    data = _maybe_gunzip(data)
    (n, rows, cols), off = _header(data, ">IIII", IMAGES_MAGIC, "3 image")
    need = off + n * rows * cols
    if len(data) < need:
        raise DataError(f"unexpected EOF at byte {len(data)}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=n * rows * cols, offset=off)
    return pixels.reshape(n, rows * cols) / 255.0


def parse_idx_labels(data):
    """IDX1 label bytes (raw or gzip) to an int64 vector of digit classes."""
    data = _maybe_gunzip(data)
    (n,), off = _header(data, ">II", LABELS_MAGIC, "1 label")
    if len(data) < off + n:
        raise DataError(f"unexpected EOF at byte {len(data)}")
    labels = np.frombuffer(data, dtype=np.uint8, count=n, offset=off).astype(np.int64)
    if labels.size and labels.max() > 9:
        raise DataError(f"label {labels.max()} out of range [0, 9]")
    return labels


def to_idx_images(images, rows, cols):
    """Encode an ``n x (rows*cols)`` array of bytes-valued pixels as IDX3."""
    images = np.asarray(images)
    n = images.shape[0]
    return struct.pack(">IIII", IMAGES_MAGIC, n, rows, cols) + images.astype(np.uint8).tobytes()


def to_idx_labels(labels):
    labels = np.asarray(labels)
    return struct.pack(">II", LABELS_MAGIC, labels.size) + labels.astype(np.uint8).tobytes()


def load_mnist(images_path, labels_path):
    try:
        images = parse_idx_images(Path(images_path).read_bytes())
        labels = parse_idx_labels(Path(labels_path).read_bytes())
    except OSError as exc:
        raise DataError(f"cannot read MNIST file: {exc}") from exc
    if len(images) != len(labels):
        raise DataError(f"{images_path} has {len(images)} images but {labels_path} has {len(labels)} labels")
    return Dataset(images, labels)


def standardize(train, *others):
    """Shift and scale every dataset by the training set's global mean and
    population standard deviation. Returns a tuple ``(train, *others)``."""
    if len(train) == 0:
        raise DataError("cannot standardize an empty training set")
    mean = float(train.features.mean())
    std = float(train.features.std())
    if std == 0.0:
        raise DataError("training features have zero standard deviation")

    def apply(ds):
        feats = (ds.features - mean) / std
        targets = feats if ds.targets is ds.features else ds.targets
        return replace(ds, features=feats, targets=targets, mean=mean, std=std)

    return tuple(apply(ds) for ds in (train, *others))


def synthetic_blobs(n_per_class, n_classes, n_features, separation, rng):
    """Isotropic unit-variance Gaussian clusters.

    Class means are ``separation / sqrt(2)`` times distinct standard basis
    vectors, so every pair of means sits exactly ``separation`` apart. Needs
    ``n_features >= n_classes``.
    """
    if min(n_per_class, n_classes, n_features) < 1:
        raise ValueError("counts must be >= 1")
    if n_features < n_classes:
        raise ValueError(f"need n_features >= n_classes, got {n_features} < {n_classes}")
    means = np.zeros((n_classes, n_features))
    means[np.arange(n_classes), np.arange(n_classes)] = separation / np.sqrt(2.0)
    labels = np.repeat(np.arange(n_classes), n_per_class)
    feats = means[labels] + rng.standard_normal((labels.size, n_features))
    order = rng.permutation(labels.size)
    return Dataset(feats[order], labels[order])
