"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``.

Same algorithm, same constants, same call signatures. The series runs a
fixed number of terms instead of stopping early, so results can differ
from the compiled path in the last bit or two.
"""

import numpy as np

TWO_OVER_SQRT_PI = 1.1283791670955126
INV_SQRT_2PI = 0.3989422804014327
SQRT1_2 = 0.7071067811865476
SERIES_LIMIT = 2.5
TAIL_CUTOFF = 27.0
SERIES_TERMS = 40
CF_DEPTH = 24


def _erf_series(ax):
    x2 = ax * ax
    term = ax.copy()
    total = ax.copy()
    for n in range(1, SERIES_TERMS):
        term *= x2 * (2.0 / (2 * n + 1))
        total += term
    return TWO_OVER_SQRT_PI * np.exp(-x2) * total


def _erfc_cf(ax):
    x2 = ax * ax
    f = 2.0 * x2 + 4.0 * CF_DEPTH + 1.0
    for k in range(CF_DEPTH, 0, -1):
        f = 2.0 * x2 + 4.0 * (k - 1) + 1.0 - (2.0 * k - 1.0) * (2.0 * k) / f
    return TWO_OVER_SQRT_PI * ax * np.exp(-x2) / f


def _pieces(x):
    """Return (|x|, series part, continued-fraction part, region masks)."""
    ax = np.abs(x)
    near = ax <= SERIES_LIMIT
    tail = ax >= TAIL_CUTOFF
    with np.errstate(invalid="ignore"):
        s = _erf_series(np.where(near, ax, 0.0))
        c = _erfc_cf(np.where(near | tail | np.isnan(ax), SERIES_LIMIT + 1.0, ax))
    return ax, s, c, near, tail


def _erf_abs(ax, s, c, near, tail):
    return np.where(near, s, np.where(tail, 1.0, 1.0 - c))


def erf(x, out):
    ax, s, c, near, tail = _pieces(x)
    r = _erf_abs(ax, s, c, near, tail)
    out[:] = np.where(np.isnan(x), x, np.where(x < 0, -r, r))


def erfc(x, out):
    ax, s, c, near, tail = _pieces(x)
    neg = x < 0
    upper = np.where(tail, 0.0, c)
    r = np.where(
        near,
        np.where(neg, 1.0 + s, 1.0 - s),
        np.where(neg, 2.0 - upper, upper),
    )
    out[:] = np.where(np.isnan(x), x, r)


def normal_cdf(x, out):
    t = x * SQRT1_2
    lower = np.empty_like(x)
    upper = np.empty_like(x)
    erfc(-t, lower)
    erf(t, upper)
    out[:] = np.where(x < 0, 0.5 * lower, 0.5 * (1.0 + upper))


def normal_pdf(x, out):
    out[:] = INV_SQRT_2PI * np.exp(-0.5 * x * x)


def gelu_forward(x, mu, sigma, out):
    cdf = np.empty_like(x)
    normal_cdf((x - mu) / sigma, cdf)
    out[:] = x * cdf


def gelu_grad(x, mu, sigma, out):
    z = (x - mu) / sigma
    cdf = np.empty_like(x)
    normal_cdf(z, cdf)
    out[:] = cdf + (x / sigma) * (INV_SQRT_2PI * np.exp(-0.5 * z * z))


def adam_update(p, g, m, v, beta1, beta2, step, inv_sqrt_bc2, eps):
    m *= beta1
    m += (1.0 - beta1) * g
    v *= beta2
    v += (1.0 - beta2) * (g * g)
    denom = np.sqrt(v)
    denom *= inv_sqrt_bc2
    denom += eps
    p -= step * m / denom
