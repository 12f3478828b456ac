import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from deltawave.quadrature import (GL_ORDER, QuadratureError, QuadratureSpec, adaptive_gl, gl_nodes,
                                  integrate, panel_edges)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_panels=3)
    with pytest.raises(ValueError):
        QuadratureSpec(window_safety=0.5)


@given(st.integers(0, 2 * GL_ORDER - 1))
def test_single_panel_exact_for_polynomials(k):
    y, w = gl_nodes(np.array([-0.3]), np.array([1.7]))
    exact = (1.7 ** (k + 1) - (-0.3) ** (k + 1)) / (k + 1)
    assert np.sum(w * y**k) == pytest.approx(exact, rel=1e-13, abs=1e-13)


def test_panel_edges_include_breaks():
    e = panel_edges(-1.0, 1.0, 0.3, breaks=(0.123, 5.0))
    assert e[0] == -1.0 and e[-1] == 1.0
    assert 0.123 in e
    assert np.all(np.diff(e) <= 0.3 + 1e-15)


def test_adaptive_resolves_narrow_gaussian():
    sig = 1e-3
    res = adaptive_gl(lambda y: np.exp(-0.5 * (y / sig) ** 2), panel_edges(-1, 1, 0.5), 1e-12, 10000)
    assert res.value == pytest.approx(sig * math.sqrt(2 * math.pi), rel=1e-11)


def test_stacked_integrands():
    res = adaptive_gl(lambda y: np.stack([np.sin(y), np.cos(y)]), panel_edges(0, 1, 0.5), 1e-13, 100)
    assert res.value[0] == pytest.approx(1 - math.cos(1), rel=1e-13)
    assert res.value[1] == pytest.approx(math.sin(1), rel=1e-13)


def test_budget_overrun_is_an_error():
    with pytest.raises(QuadratureError):
        adaptive_gl(lambda y: np.sign(np.sin(200 * y)), panel_edges(0, 1, 1.0), 1e-14, 8)


def test_non_finite_integrand_is_an_error():
    with pytest.raises(QuadratureError):
        integrate(lambda y: 1.0 / (y - 0.5) * 0 + np.where(y > 0.5, np.inf, 1.0), 0.0, 1.0)


def test_integrate_orientation():
    assert integrate(np.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1), rel=1e-14)
    assert integrate(np.exp, 0.3, 0.3) == 0.0


def test_abs_value_and_vanishing_row():
    res = adaptive_gl(lambda x: np.stack([np.sin(x), np.cos(x)]), [0.0, np.pi, 2 * np.pi])
    assert np.allclose(res.abs_value, [4.0, 4.0], rtol=1e-12)
    assert abs(res.value[0]) < 1e-14


def test_subnormal_integrand_terminates():
    res = adaptive_gl(lambda x: 1e-310 * np.sin(7 * x) * np.exp(-x * x), [-3.0, 0.0, 3.0], max_panels=200)
    assert abs(res.value) < 1e-300


def test_integrate_subnormal_interval():
    assert integrate(lambda y: y, 0.0, 5e-324) == 0.0
