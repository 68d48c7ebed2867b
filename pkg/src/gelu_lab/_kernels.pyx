# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled elementwise kernels: error function, exact GELU, fused Adam update.

Each public function fills ``out`` from ``x`` over 1-D contiguous float64
buffers. Shape handling lives in :mod:`gelu_lab._backend`.
"""

from libc.math cimport exp, fabs, isnan, isinf, sqrt

cdef double TWO_OVER_SQRT_PI = 1.1283791670955126
cdef double INV_SQRT_2PI = 0.3989422804014327
cdef double SQRT1_2 = 0.7071067811865476
cdef double SERIES_LIMIT = 2.5
cdef double TAIL_CUTOFF = 27.0
cdef int SERIES_MAX_TERMS = 60
cdef int CF_DEPTH = 24
cdef double TWO_OVER_ODD[60]  # 2 / (2n + 1)

for _n in range(SERIES_MAX_TERMS):
    TWO_OVER_ODD[_n] = 2.0 / (2 * _n + 1)


cdef inline double _erf_series(double ax) noexcept nogil:
    # e^{x^2} erf(x) expanded in positive terms: x * sum (2x^2)^n / (2n+1)!!
    cdef double x2 = ax * ax
    cdef double term = ax
    cdef double total = ax
    cdef int n
    for n in range(1, SERIES_MAX_TERMS):
        term *= x2 * TWO_OVER_ODD[n]
        total += term
        if term <= 1e-17 * total:
            break
    return TWO_OVER_SQRT_PI * exp(-x2) * total


cdef inline double _erfc_cf(double ax) noexcept nogil:
    # even contraction of the Laplace continued fraction, evaluated bottom-up
    cdef double x2 = ax * ax
    cdef double f = 2.0 * x2 + 4.0 * CF_DEPTH + 1.0
    cdef int k
    for k in range(CF_DEPTH, 0, -1):
        f = 2.0 * x2 + 4.0 * (k - 1) + 1.0 - (2.0 * k - 1.0) * (2.0 * k) / f
    return TWO_OVER_SQRT_PI * ax * exp(-x2) / f


cdef inline double c_erf(double x) noexcept nogil:
    cdef double ax, r
    if isnan(x):
        return x
    ax = fabs(x)
    if ax <= SERIES_LIMIT:
        r = _erf_series(ax)
    elif ax < TAIL_CUTOFF:
        r = 1.0 - _erfc_cf(ax)
    else:
        r = 1.0
    return -r if x < 0 else r


cdef inline double c_erfc(double x) noexcept nogil:
    cdef double ax
    if isnan(x):
        return x
    ax = fabs(x)
    if ax <= SERIES_LIMIT:
        if x < 0:
            return 1.0 + _erf_series(ax)
        return 1.0 - _erf_series(ax)
    if ax >= TAIL_CUTOFF:
        return 2.0 if x < 0 else 0.0
    if x < 0:
        return 2.0 - _erfc_cf(ax)
    return _erfc_cf(ax)


cdef inline double c_normal_cdf(double z) noexcept nogil:
    cdef double t = z * SQRT1_2
    if z < 0:
        return 0.5 * c_erfc(-t)
    return 0.5 * (1.0 + c_erf(t))


cdef inline double c_normal_pdf(double z) noexcept nogil:
    if isinf(z):
        return 0.0
    return INV_SQRT_2PI * exp(-0.5 * z * z)


def erf(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            out[i] = c_erf(x[i])


def erfc(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            out[i] = c_erfc(x[i])


def normal_cdf(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            out[i] = c_normal_cdf(x[i])


def gelu_forward(const double[::1] x, double mu, double sigma, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            out[i] = x[i] * c_normal_cdf((x[i] - mu) / sigma)


def gelu_grad(const double[::1] x, double mu, double sigma, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    cdef double z
    with nogil:
        for i in range(n):
            z = (x[i] - mu) / sigma
            out[i] = c_normal_cdf(z) + (x[i] / sigma) * c_normal_pdf(z)


def normal_pdf(const double[::1] x, double[::1] out):
    cdef Py_ssize_t i, n = x.shape[0]
    with nogil:
        for i in range(n):
            out[i] = c_normal_pdf(x[i])


def adam_update(double[::1] p, const double[::1] g, double[::1] m, double[::1] v,
                double beta1, double beta2, double step, double inv_sqrt_bc2, double eps):
    # p -= step * m / (sqrt(v) / sqrt(bc2) + eps), with step = lr / bc1
    cdef Py_ssize_t i, n = p.shape[0]
    with nogil:
        for i in range(n):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g[i]
            v[i] = beta2 * v[i] + (1.0 - beta2) * (g[i] * g[i])
            p[i] -= step * m[i] / (sqrt(v[i]) * inv_sqrt_bc2 + eps)
