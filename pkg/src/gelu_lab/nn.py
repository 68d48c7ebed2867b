"""A minimal dense feedforward stack trained with Adam.

Arrays are plain 2-D float64 numpy arrays (batch x features). Parameters
are updated in place.
"""

from dataclasses import dataclass, field

import numpy as np

from gelu_lab import _backend
from gelu_lab.activations import Gelu, act_backward_batch, act_forward_batch
from gelu_lab.soi import Mode, SoiLayer, soi_backward, soi_forward

_GELU = Gelu()


class Identity:
    """Marker for a layer with no nonlinearity."""

    name = "identity"

    def __repr__(self):
        return "Identity()"


IDENTITY = Identity()


def as_tensor(x, what="tensor"):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise ValueError(f"{what} must be a non-empty 2-D array, got shape {x.shape}")
    return x


def matmul(a, b):
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


@dataclass
class DenseLayer:
    weights: np.ndarray  # fan_in x fan_out
    bias: np.ndarray  # fan_out
    nonlin: object = IDENTITY  # activation kind, SoiLayer or IDENTITY

    @property
    def fan_in(self):
        return self.weights.shape[0]

    @property
    def fan_out(self):
        return self.weights.shape[1]


@dataclass(frozen=True)
class DropoutSpec:
    drop_prob: float

    def __post_init__(self):
        if not 0.0 <= self.drop_prob < 1.0:
            raise ValueError(f"drop_prob must be in [0, 1), got {self.drop_prob}")


def dense_forward(layer, x):
    """Affine map then nonlinearity; returns ``(pre_act, out)``.

    A SOI layer in train mode keeps its sampled mask on ``layer.nonlin.last_mask``
    for the backward pass.
    """
    if x.shape[1] != layer.fan_in:
        raise ValueError(f"shape mismatch: input {x.shape} into layer {layer.weights.shape}")
    pre = matmul(x, layer.weights) + layer.bias
    nl = layer.nonlin
    if isinstance(nl, Identity):
        return pre, pre
    if isinstance(nl, SoiLayer):
        return pre, soi_forward(nl, pre)[0]
    return pre, act_forward_batch(nl, pre)


def _nonlin_backward(nl, pre, upstream):
    if isinstance(nl, Identity):
        return upstream
    if isinstance(nl, SoiLayer):
        if nl.mode is Mode.TRAIN:
            return soi_backward(nl.last_mask, upstream)
        return act_backward_batch(_GELU, pre, upstream)
    return act_backward_batch(nl, pre, upstream)


def dense_backward(layer, x, pre_act, upstream):
    """Return ``(dW, db, dx)`` for one layer given the gradient at its output."""
    if upstream.shape != pre_act.shape or x.shape[0] != pre_act.shape[0]:
        raise ValueError(
            f"shape mismatch: x {x.shape}, pre_act {pre_act.shape}, upstream {upstream.shape}"
        )
    delta = _nonlin_backward(layer.nonlin, pre_act, upstream)
    return matmul(x.T, delta), delta.sum(axis=0), matmul(delta, layer.weights.T)


def dropout_forward(spec, x, rng, mode):
    """Inverted dropout; returns ``(y, mask)`` with ``mask`` already scaled by 1/keep."""
    if Mode(mode) is Mode.EVAL or spec.drop_prob == 0.0:
        return x, None
    keep = 1.0 - spec.drop_prob
    mask = (rng.random(x.shape) < keep) / keep
    return x * mask, mask


def softmax_cross_entropy(logits, labels):
    """Mean negative log-likelihood and its gradient w.r.t. the logits."""
    labels = np.asarray(labels)
    n, k = logits.shape
    if labels.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {labels.shape}")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"label out of range [0, {k})")
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_z = np.log(np.exp(shifted).sum(axis=1))
    rows = np.arange(n)
    loss = float(np.mean(log_z - shifted[rows, labels]))
    probs = np.exp(shifted - log_z[:, None])
    probs[rows, labels] -= 1.0
    return loss, probs / n


def mse_loss(pred, target):
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    diff = pred - target
    return float(np.mean(diff * diff)), 2.0 * diff / diff.size


LOSSES = {"xent": softmax_cross_entropy, "mse": mse_loss}


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    t: int = 0
    m: list = field(default_factory=list)
    v: list = field(default_factory=list)


def adam_step(state, params, grads):
    """One bias-corrected Adam update, applied to ``params`` in place."""
    if len(params) != len(grads):
        raise ValueError(f"{len(params)} params but {len(grads)} grads")
    if not state.m:
        state.m = [np.zeros_like(p) for p in params]
        state.v = [np.zeros_like(p) for p in params]
    state.t += 1
    b1, b2 = state.beta1, state.beta2
    step = state.lr / (1.0 - b1**state.t)
    inv_sqrt_bc2 = 1.0 / np.sqrt(1.0 - b2**state.t)
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != np.shape(g):
            raise ValueError(f"shape mismatch: param {p.shape} vs grad {np.shape(g)}")
        _backend.adam_update(p, g, m, v, b1, b2, step, inv_sqrt_bc2, state.epsilon)
    return params


def hypersphere_init(fan_in, fan_out, rng):
    """Weights whose columns (one per output unit) are uniform on the unit sphere."""
    if fan_in < 1 or fan_out < 1:
        raise ValueError(f"fan_in and fan_out must be >= 1, got {fan_in}, {fan_out}")
    w = rng.standard_normal((fan_in, fan_out))
    return w / np.linalg.norm(w, axis=0)


class DenseNet:
    """Dense layers with optional dropout after each one.

    ``dropout[i]`` applies to the output of ``layers[i]`` (``None`` for none).
    """

    def __init__(self, layers, dropout=None, dropout_rng=None):
        for a, b in zip(layers, layers[1:]):
            if a.fan_out != b.fan_in:
                raise ValueError(f"layer widths do not compose: {a.weights.shape} -> {b.weights.shape}")
        self.layers = list(layers)
        self.dropout = list(dropout) if dropout is not None else [None] * len(layers)
        if len(self.dropout) != len(self.layers):
            raise ValueError("need one dropout entry per layer")
        self.dropout_rng = dropout_rng
        self.mode = Mode.TRAIN
        self._cache = None

    @classmethod
    def build(cls, widths, hidden, output=IDENTITY, *, dropout=0.0, seed=0, init_rng=None,
              dropout_rng=None):
        """Stack of ``len(widths) - 1`` layers with hypersphere init.

        ``hidden`` is an activation kind or the string ``"soi"``; SOI layers
        get independent streams derived from ``seed``.
        """
        from gelu_lab.rng import stream

        if len(widths) < 2 or min(widths) < 1:
            raise ValueError(f"invalid widths {widths}")
        init_rng = init_rng or stream(seed, "init")
        layers, drops = [], []
        n = len(widths) - 1
        for i, (a, b) in enumerate(zip(widths, widths[1:])):
            last = i == n - 1
            if last:
                nl = output
            elif hidden == "soi":
                nl = SoiLayer(stream(seed, "soi", i))
            else:
                nl = hidden
            layers.append(DenseLayer(hypersphere_init(a, b, init_rng), np.zeros(b), nl))
            drops.append(DropoutSpec(dropout) if dropout and not last else None)
        return cls(layers, drops, dropout_rng or stream(seed, "dropout"))

    def set_mode(self, mode):
        self.mode = Mode(mode)
        for layer in self.layers:
            if isinstance(layer.nonlin, SoiLayer):
                layer.nonlin.mode = self.mode

    def params(self):
        out = []
        for layer in self.layers:
            out += [layer.weights, layer.bias]
        return out

    def forward(self, x):
        x = as_tensor(x, "input")
        cache = []
        for layer, drop in zip(self.layers, self.dropout):
            pre, out = dense_forward(layer, x)
            mask = None
            if drop is not None:
                out, mask = dropout_forward(drop, out, self.dropout_rng, self.mode)
            cache.append((x, pre, mask))
            x = out
        self._cache = cache
        return x

    def backward(self, dout):
        """Gradients matching :meth:`params` order, from the last forward pass."""
        if self._cache is None:
            raise RuntimeError("backward called before forward")
        grads = []
        for layer, (x, pre, mask) in zip(reversed(self.layers), reversed(self._cache)):
            if mask is not None:
                dout = dout * mask
            dw, db, dout = dense_backward(layer, x, pre, dout)
            grads += [db, dw]
        return grads[::-1]


def _iter_batches(n, batch_size, order=None):
    idx = np.arange(n) if order is None else order
    for start in range(0, n, batch_size):
        yield idx[start:start + batch_size]


def train_epoch(net, dataset, optimizer, rng, *, batch_size=128, loss="xent"):
    """One shuffled pass with an Adam step per minibatch; returns the mean batch loss."""
    n = len(dataset)
    if n == 0:
        raise ValueError("empty dataset")
    loss_fn = LOSSES[loss]
    net.set_mode(Mode.TRAIN)
    losses = []
    params = net.params()
    for idx in _iter_batches(n, batch_size, rng.permutation(n)):
        out = net.forward(dataset.features[idx])
        value, dout = loss_fn(out, dataset.targets[idx])
        adam_step(optimizer, params, net.backward(dout))
        losses.append(value)
    return float(np.mean(losses))


def evaluate(net, dataset, *, loss="xent", batch_size=1000):
    """Mean per-example loss in eval mode (no dropout, SOI replaced by GELU).

    The network's mode is restored afterwards and no parameters change.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("empty dataset")
    loss_fn = LOSSES[loss]
    prev = net.mode
    net.set_mode(Mode.EVAL)
    try:
        total = 0.0
        for idx in _iter_batches(n, batch_size):
            value, _ = loss_fn(net.forward(dataset.features[idx]), dataset.targets[idx])
            total += value * len(idx)
    finally:
        net.set_mode(prev)
        net._cache = None
    return total / n
