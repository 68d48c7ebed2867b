"""Scalar special functions behind every activation.

All functions accept a Python float or a numpy array and return the same
kind. The error-function family dispatches to the active kernel backend
(compiled Cython or the numpy fallback); the Laplace and Cauchy CDFs are
closed forms and use numpy directly.

``erf`` combines two expansions:

* ``|x| <= 2.5``: the positive-term series
  ``erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (2n+1)!!``,
  which has no cancellation, unlike the alternating Maclaurin series.
* ``|x| > 2.5``: ``erfc`` from the even contraction of the Laplace
  continued fraction at fixed depth 24, then ``erf = 1 - erfc``.

Both pieces agree with a 40-digit reference to about 1e-15 absolute.
"""

import numpy as np

from gelu_lab import _backend

__all__ = [
    "erf",
    "erfc",
    "std_normal_cdf",
    "std_normal_pdf",
    "laplace_cdf",
    "cauchy_cdf",
]


def _out(arr, like):
    return float(arr) if np.ndim(like) == 0 else arr


def erf(x):
    """Error function, accurate to ~1e-15 absolute for all real ``x``."""
    return _backend.erf(x)


def erfc(x):
    """Complementary error function ``1 - erf(x)``, relative-accurate for x > 2.5."""
    return _backend.erfc(x)


def std_normal_cdf(x):
    """Standard normal CDF.

    Evaluated as ``0.5 * erfc(-x/sqrt(2))`` for negative ``x`` so the lower
    tail keeps relative precision; mathematically the same as
    ``0.5 * (1 + erf(x/sqrt(2)))``.
    """
    return _backend.normal_cdf(x)


def std_normal_pdf(x):
    return _backend.normal_pdf(x)


def laplace_cdf(x):
    """CDF of the standard Laplace distribution (location 0, scale 1)."""
    a = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        half_tail = 0.5 * np.exp(-np.abs(a))
    return _out(np.where(a < 0, half_tail, 1.0 - half_tail), x)


def cauchy_cdf(x):
    """CDF of the standard Cauchy distribution."""
    a = np.asarray(x, dtype=np.float64)
    return _out(np.arctan(a) / np.pi + 0.5, x)
