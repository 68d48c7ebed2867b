import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gelu_lab import scalar_math as sm
from oracles import erf_taylor, normal_cdf_ref

finite = st.floats(-50, 50, allow_nan=False)


def test_erf_origin_and_odd(backend):
    assert sm.erf(0.0) == 0.0
    assert sm.erf(-1.0) == -sm.erf(1.0)


def test_erf_one(backend):
    # 30-digit series value 0.842700792949714869341...
    assert sm.erf(1.0) == pytest.approx(0.8427007929497149, abs=1e-15)
    assert sm.erf(1.0) == pytest.approx(erf_taylor(1.0), abs=1e-15)


def test_erf_dense_grid(backend, erf_grid):
    xs, ref = erf_grid
    assert np.max(np.abs(sm.erf(xs) - ref)) <= 1e-14


@pytest.mark.parametrize("x", [2.4999999, 2.5, 2.5000001, -2.5, 26.9, 27.0])
def test_erf_branch_boundaries(backend, x):
    assert sm.erf(x) == pytest.approx(erf_taylor(x), abs=1e-15)


def test_erfc_tail_relative(backend):
    import mpmath

    for x in (3.0, 5.0, 10.0, 20.0):
        assert sm.erfc(x) == pytest.approx(float(mpmath.erfc(x)), rel=1e-13)
    assert sm.erfc(-3.0) == pytest.approx(2.0 - float(mpmath.erfc(3.0)), abs=1e-15)


def test_limits_and_nan(backend):
    assert sm.erf(math.inf) == 1.0 and sm.erf(-math.inf) == -1.0
    assert sm.std_normal_cdf(math.inf) == 1.0 and sm.std_normal_cdf(-math.inf) == 0.0
    assert sm.std_normal_pdf(math.inf) == 0.0
    assert sm.laplace_cdf(math.inf) == 1.0 and sm.laplace_cdf(-math.inf) == 0.0
    assert sm.cauchy_cdf(math.inf) == 1.0
    for f in (sm.erf, sm.erfc, sm.std_normal_cdf, sm.laplace_cdf, sm.cauchy_cdf):
        assert math.isnan(f(math.nan))


def test_normal_cdf_values(backend):
    assert sm.std_normal_cdf(0.0) == 0.5
    assert sm.std_normal_cdf(1.0) == pytest.approx(0.841344746068543, abs=1e-13)
    for x in (-8.0, -3.0, -0.5, 0.7, 4.0):
        assert sm.std_normal_cdf(x) == pytest.approx(normal_cdf_ref(x), rel=1e-12)


def test_normal_pdf_values(backend):
    assert sm.std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, rel=1e-15)
    # exp(-4.5)/sqrt(2 pi) = 0.00443184841193800...
    assert sm.std_normal_pdf(3.0) == pytest.approx(0.004431848411938008, rel=1e-14)


def test_laplace_and_cauchy_values():
    assert sm.laplace_cdf(0.0) == 0.5
    assert sm.laplace_cdf(-1.0) == pytest.approx(0.18393972058572117, rel=1e-15)
    assert sm.cauchy_cdf(0.0) == 0.5
    assert sm.cauchy_cdf(1.0) == pytest.approx(0.75, abs=1e-16)
    assert sm.cauchy_cdf(-1.0) == pytest.approx(0.25, abs=1e-16)


def test_array_in_array_out(backend):
    x = np.array([[0.0, 1.0], [-1.0, 2.0]])
    for f in (sm.erf, sm.erfc, sm.std_normal_cdf, sm.std_normal_pdf, sm.laplace_cdf, sm.cauchy_cdf):
        y = f(x)
        assert isinstance(y, np.ndarray) and y.shape == x.shape
        assert isinstance(f(0.3), float)


@given(finite)
def test_symmetries(x):
    assert sm.erf(-x) == -sm.erf(x)
    assert abs(sm.std_normal_cdf(x) + sm.std_normal_cdf(-x) - 1.0) <= 1e-15
    assert sm.std_normal_pdf(x) == sm.std_normal_pdf(-x)
    assert abs(sm.laplace_cdf(x) + sm.laplace_cdf(-x) - 1.0) <= 1e-15
    assert abs(sm.cauchy_cdf(x) + sm.cauchy_cdf(-x) - 1.0) <= 1e-15
    assert abs(sm.erf(x)) <= 1.0


def test_cdfs_monotone(backend):
    xs = np.sort(np.random.default_rng(7).uniform(-10, 10, 10_000))
    for f in (sm.erf, sm.std_normal_cdf, sm.laplace_cdf, sm.cauchy_cdf):
        assert np.all(np.diff(f(xs)) >= 0), f.__name__


def test_cdfs_saturate(backend):
    for f in (sm.std_normal_cdf, sm.laplace_cdf):
        assert f(-40.0) <= 1e-12
        assert 1.0 - f(40.0) <= 1e-12
    assert sm.cauchy_cdf(-1e8) <= 1e-7


def test_backends_agree():
    from gelu_lab import _backend

    if len(_backend.BACKENDS) < 2:
        pytest.skip("compiled kernels not built")
    xs = np.linspace(-30, 30, 20_001)
    results = {}
    prev = _backend.NAME
    for name in _backend.BACKENDS:
        _backend.use(name)
        results[name] = (sm.erf(xs), sm.erfc(xs), sm.std_normal_cdf(xs), _backend.gelu_grad(xs, 0.0, 1.0))
    _backend.use(prev)
    for a, b in zip(results["python"], results["compiled"]):
        np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-15)
