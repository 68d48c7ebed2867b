"""The stochastic 0-I map.

In training mode each input ``x`` is kept (identity) with probability
``Phi(x)`` and zeroed otherwise, so the expected output is ``x * Phi(x)``,
the exact GELU. Evaluation mode returns that expectation directly.
"""

import enum

import numpy as np

from gelu_lab.activations import Gelu, act_forward_batch
from gelu_lab.rng import stream
from gelu_lab.scalar_math import std_normal_cdf

_GELU = Gelu()


class Mode(enum.Enum):
    TRAIN = "train"
    EVAL = "eval"


class SoiLayer:
    """Stateful SOI map. One instance per network position; not thread-safe.

    ``rng`` may be a ``numpy.random.Generator`` or an int seed.
    """

    def __init__(self, rng=0, mode=Mode.TRAIN):
        self.rng = stream(rng, "soi") if isinstance(rng, (int, np.integer)) else rng
        self.mode = Mode(mode)
        self.last_mask = None

    def __repr__(self):
        return f"SoiLayer(mode={self.mode.value})"


def soi_sample_mask(layer, x):
    """Draw a 0/1 mask with ``P(mask_ij = 1) = Phi(x_ij)``."""
    if layer.mode is not Mode.TRAIN:
        raise RuntimeError("mask sampling requires Train mode")
    x = np.asarray(x, dtype=np.float64)
    u = layer.rng.random(x.shape)
    return (u < std_normal_cdf(x)).astype(np.float64)


def soi_forward(layer, x):
    """Apply the map; returns ``(y, mask)``.

    Eval mode gives the deterministic GELU with an all-ones mask sentinel.
    """
    x = np.asarray(x, dtype=np.float64)
    if layer.mode is Mode.EVAL:
        return act_forward_batch(_GELU, x), np.ones_like(x)
    mask = soi_sample_mask(layer, x)
    layer.last_mask = mask
    return mask * x, mask


def soi_backward(mask, upstream):
    # the realized mask is a fixed linear map; no gradient through Phi(x)
    mask = np.asarray(mask, dtype=np.float64)
    upstream = np.asarray(upstream, dtype=np.float64)
    if mask.shape != upstream.shape:
        raise ValueError(f"shape mismatch: mask {mask.shape} vs upstream {upstream.shape}")
    return upstream * mask
