import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from genhilbert.errors import NumericError
from genhilbert.quadrature import adaptive_gl, composite_rule, gauss_legendre


def test_rule_integrates_polynomials_exactly():
    x, w = gauss_legendre(10)
    for deg in range(20):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.dot(w, x ** deg) == pytest.approx(exact, abs=1e-14)


def test_composite_rule_covers_panels():
    nodes, weights = composite_rule([[0.0, 1.0], [1.0, 3.0]], order=5)
    assert weights.sum() == pytest.approx(3.0)
    assert nodes.min() > 0.0 and nodes.max() < 3.0


@given(st.floats(0.1, 20.0))
def test_exponential(c):
    res = adaptive_gl(lambda x: np.exp(-c * x), 0.0, 5.0, rtol=1e-12)
    assert float(res) == pytest.approx(-math.expm1(-5 * c) / c, rel=1e-11)


def test_vector_valued_integrand():
    res = adaptive_gl(lambda x: np.stack([np.sin(x), np.cos(x)], axis=1), 0.0, math.pi)
    np.testing.assert_allclose(res.value, [2.0, 0.0], atol=1e-12)


def test_endpoint_singularity_refines():
    # sqrt singularity at 0: adaptive bisection still converges
    res = adaptive_gl(np.sqrt, breakpoints=[0.0, 0.5, 1.0], rtol=1e-10)
    assert float(res) == pytest.approx(2.0 / 3.0, rel=1e-9)
    assert np.all(np.diff(res.panels[:, 0]) > 0)


def test_nonconvergence_carries_partial():
    with pytest.raises(NumericError) as info:
        adaptive_gl(lambda x: 1.0 / x, 0.0, 1.0, max_panels=50)
    assert info.value.partial is not None


def test_breakpoints_must_increase():
    with pytest.raises(ValueError):
        adaptive_gl(np.sin, breakpoints=[0.0, 1.0, 1.0])
