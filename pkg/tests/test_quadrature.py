import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seamlab.errors import DivergentTail, NonConvergent
from seamlab.quadrature import (
    TRANSFORMS,
    QuadratureSpec,
    StripSpec,
    TransformResult,
    integrate,
    laplace_halfline,
    wynn_epsilon,
)


@pytest.mark.parametrize("name", TRANSFORMS)
def test_gamma_half_all_transforms(name):
    r = integrate(lambda x: np.exp(-x) / np.sqrt(x), QuadratureSpec(variable_transform=name))
    assert r.converged
    assert abs(r.value - math.sqrt(math.pi)) < 1e-13
    assert r.est_error <= 1e-13


def test_bessel_oracle():
    # int_0^inf exp(-t - 1/t) dt / t = 2 K_0(2)
    r = integrate(lambda t: np.exp(-t - 1 / t) / t)
    assert abs(r.value - 0.22778774549906701) < 1e-13


def test_real_line_gaussian():
    r = integrate(lambda x: np.exp(-x * x), QuadratureSpec(variable_transform="double-exponential-real-line"),
                  domain="real")
    assert abs(r.value - math.sqrt(math.pi)) < 1e-13


def test_zero_integrand():
    r = integrate(lambda x: np.zeros_like(x))
    assert r.value == 0 and r.converged


def test_divergent_tail_detected():
    with pytest.raises((DivergentTail, NonConvergent)):
        integrate(lambda x: np.exp(0.2 * x))
    with pytest.raises((DivergentTail, NonConvergent)):
        integrate(lambda x: 1.0 / (1.0 + x))


def test_refinement_doubles_and_error_is_last_difference():
    spec = QuadratureSpec(node_count=16, target_tol=1e-300, refinement_limit=3)
    r = integrate(lambda x: np.exp(-x), spec)
    # 17 initial nodes then 16, 32, 64 midpoints
    assert r.nodes_used == 17 + 16 + 32 + 64
    assert not r.converged


def test_converged_implies_error_below_target():
    for tol in (1e-6, 1e-10, 1e-13):
        r = integrate(lambda x: x**2 * np.exp(-x), QuadratureSpec(target_tol=tol))
        assert r.converged and r.est_error <= tol
        assert abs(r.value - 2.0) < max(10 * tol, 1e-14)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(node_count=8)
    with pytest.raises(ValueError):
        QuadratureSpec(variable_transform="gauss")
    with pytest.raises(ValueError):
        QuadratureSpec(target_tol=0)
    assert QuadratureSpec().doubled().node_count == 128


def test_strip_spec():
    s = StripSpec(-0.25, 0.75)
    assert s.contains(0.0) and not s.contains(0.75) and s.midline == 0.25
    with pytest.raises(ValueError):
        StripSpec(1.0, 1.0)
    h = StripSpec(-0.5, 0.5, "horizontal")
    assert h.contains(3.0 + 0.4j) and not h.contains(0.6j)


def test_transform_result_arithmetic():
    a = TransformResult(1 + 1j, 1e-3, 10, True)
    b = TransformResult(2.0, 1e-4, 5, False)
    c = a + b
    assert c.value == 3 + 1j and c.nodes_used == 15 and not c.converged
    assert a.scaled(-2).est_error == 2e-3


def test_laplace_closed_forms():
    r = laplace_halfline(lambda x: np.exp(-x), 2j)
    assert abs(r.value - 1 / (1 + 2j)) < 1e-14
    r = laplace_halfline(lambda x: np.exp(-x), 0.5 + 40j)
    assert abs(r.value - 1 / (1.5 + 40j)) < 1e-14


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-60, 60))
def test_laplace_of_exponential(a, w):
    r = laplace_halfline(lambda x: np.exp(-a * x), 1j * w)
    assert abs(r.value - 1 / (a + 1j * w)) < 1e-12


def test_laplace_divergence():
    with pytest.raises(DivergentTail):
        laplace_halfline(lambda x: np.exp(0.5 * x), 0.1)


def test_wynn_epsilon_accelerates_alternating_series():
    partial = np.cumsum([(-1) ** k / (k + 1) for k in range(20)])
    val, err = wynn_epsilon(partial)
    assert abs(val - math.log(2)) < 1e-10
    assert err < 1e-8
