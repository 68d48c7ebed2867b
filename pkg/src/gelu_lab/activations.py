"""Forward values and derivatives for the nonlinearities under study.

Every kind is a small frozen dataclass with ``forward`` and ``grad`` methods
that work elementwise on floats or numpy arrays. The module-level
``act_*`` functions are the public entry points used by the network code.
"""

import math
from dataclasses import dataclass

import numpy as np

from gelu_lab import _backend
from gelu_lab.scalar_math import cauchy_cdf, laplace_cdf

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
TANH_CUBIC_COEF = 0.044715


def _asarray(x):
    return np.asarray(x, dtype=np.float64)


def _like(result, x):
    return float(result) if np.ndim(x) == 0 else result


@dataclass(frozen=True)
class Relu:
    name = "relu"

    def forward(self, x):
        return _like(np.maximum(_asarray(x), 0.0), x)

    def grad(self, x):
        # subgradient 0 at the kink
        return _like((_asarray(x) > 0).astype(np.float64), x)


@dataclass(frozen=True)
class Elu:
    alpha: float = 1.0
    name = "elu"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"ELU alpha must be positive, got {self.alpha}")

    def forward(self, x):
        a = _asarray(x)
        return _like(np.where(a > 0, a, self.alpha * np.expm1(np.minimum(a, 0.0))), x)

    def grad(self, x):
        a = _asarray(x)
        return _like(np.where(a > 0, 1.0, self.alpha * np.exp(np.minimum(a, 0.0))), x)


@dataclass(frozen=True)
class Gelu:
    """``x * P(X <= x)`` with ``X ~ N(mu, sigma^2)``."""

    mu: float = 0.0
    sigma: float = 1.0
    name = "gelu"

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"GELU sigma must be positive, got {self.sigma}")

    def forward(self, x):
        return _backend.gelu_forward(x, self.mu, self.sigma)

    def grad(self, x):
        return _backend.gelu_grad(x, self.mu, self.sigma)


@dataclass(frozen=True)
class GeluTanh:
    """The tanh approximation ``0.5x(1 + tanh(sqrt(2/pi)(x + 0.044715x^3)))``.

    ``grad`` differentiates the approximation itself, not the exact GELU.
    """

    name = "gelu-tanh"

    def forward(self, x):
        a = _asarray(x)
        t = np.tanh(SQRT_2_OVER_PI * (a + TANH_CUBIC_COEF * a**3))
        return _like(0.5 * a * (1.0 + t), x)

    def grad(self, x):
        a = _asarray(x)
        t = np.tanh(SQRT_2_OVER_PI * (a + TANH_CUBIC_COEF * a**3))
        du = SQRT_2_OVER_PI * (1.0 + 3.0 * TANH_CUBIC_COEF * a * a)
        return _like(0.5 * (1.0 + t) + 0.5 * a * (1.0 - t * t) * du, x)


@dataclass(frozen=True)
class CauchyLU:
    """``x * P(C <= x)`` with ``C`` standard Cauchy."""

    name = "cauchylu"

    def forward(self, x):
        a = _asarray(x)
        return _like(a * cauchy_cdf(a), x)

    def grad(self, x):
        a = _asarray(x)
        return _like(cauchy_cdf(a) + a / (np.pi * (1.0 + a * a)), x)


@dataclass(frozen=True)
class LaLU:
    """``x * P(L <= x)`` with ``L`` standard Laplace."""

    name = "lalu"

    def forward(self, x):
        a = _asarray(x)
        return _like(a * laplace_cdf(a), x)

    def grad(self, x):
        a = _asarray(x)
        return _like(laplace_cdf(a) + a * 0.5 * np.exp(-np.abs(a)), x)


ActivationKind = Relu | Elu | Gelu | GeluTanh | CauchyLU | LaLU
ALL_KINDS = (Relu, Elu, Gelu, GeluTanh, CauchyLU, LaLU)


def from_name(name, *, alpha=1.0, mu=0.0, sigma=1.0):
    """Build an activation from its CLI name."""
    name = name.lower()
    if name == "elu":
        return Elu(alpha)
    if name == "gelu":
        return Gelu(mu, sigma)
    for cls in (Relu, GeluTanh, CauchyLU, LaLU):
        if cls.name == name:
            return cls()
    raise ValueError(f"unknown activation {name!r}")


def act_forward(kind, x):
    return kind.forward(x)


def act_grad(kind, x):
    return kind.grad(x)


def _check_2d(x, what="x"):
    x = _asarray(x)
    if x.ndim != 2:
        raise ValueError(f"{what} must be 2-D, got shape {x.shape}")
    return x


def act_forward_batch(kind, x):
    return kind.forward(_check_2d(x))


def act_backward_batch(kind, x, upstream):
    x = _check_2d(x)
    upstream = _check_2d(upstream, "upstream")
    if x.shape != upstream.shape:
        raise ValueError(f"shape mismatch: x {x.shape} vs upstream {upstream.shape}")
    return upstream * kind.grad(x)


def grid(lo, hi, step):
    """Inclusive grid ``lo, lo+step, ...`` with ``floor((hi-lo)/step)+1`` points."""
    if step <= 0 or hi < lo:
        raise ValueError(f"empty grid for lo={lo}, hi={hi}, step={step}")
    n = math.floor((hi - lo) / step + 1e-9) + 1
    return lo + step * np.arange(n, dtype=np.float64)


def approximation_error_scan(lo, hi, step):
    """Largest gap between the tanh approximation and the exact GELU on a grid.

    Returns ``(max_abs_err, argmax)``.
    """
    xs = grid(lo, hi, step)
    err = np.abs(GeluTanh().forward(xs) - Gelu().forward(xs))
    i = int(np.argmax(err))
    return float(err[i]), float(xs[i])
