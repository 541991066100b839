import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seamlab import theta
from seamlab.errors import DomainError
from seamlab.theta import (
    DEFAULT_POLICY,
    MacroScale,
    SelfDualScale,
    TruncationPolicy,
    arch_completion_apply,
    centered_kernels,
    f_theta,
    f_theta_derivative,
    gaussian_sum,
    gaussian_sum_bound_check,
    phi_star,
    theta_completed,
    theta_completed_derivative,
    theta_jacobi,
    trace_kernel_KL,
    twist_exponent,
    twist_residual,
)

# direct summation at 30 digits (mpmath), frozen
THETA_1 = 1.08643481121330801457531612151
BIG_THETA = {1.0: 0.446696900467123444086984667055, 2.0: 0.0793705556649265859669870958441,
             4.0: 0.000484964176710218332720081966863, 0.5: 0.224493832548855718550221101189}
PHI = {0.0: -0.91356518878669198542468387849, 4.0: -0.04978706836786394297934241565,
       -4.0: -2.71828182845904523536028747135, 1.5: -0.324651411856564698092404786058}


def _brute_theta(u, n=60):
    k = np.arange(-n, n + 1)
    return float(np.exp(-math.pi * k * k * u).sum())


def test_theta_jacobi_values():
    assert abs(theta_jacobi(1.0) - THETA_1) < 1e-15
    assert theta_jacobi(1e6) == 1.0
    assert abs(theta_jacobi(2.0) - 2**-0.5 * theta_jacobi(0.5)) < 1e-12


@pytest.mark.parametrize("u", [0.05, 0.3, 1.0, 2.5, 20.0])
def test_theta_jacobi_against_brute_force(u):
    assert abs(theta_jacobi(u) - _brute_theta(u, 200)) < 1e-13 * _brute_theta(u, 200)


def test_theta_jacobi_tail_bound_below_policy():
    for u in (0.05, 1.0, 7.0):
        _, b = theta_jacobi(u, return_bound=True)
        assert b <= DEFAULT_POLICY.tail_tol


def test_theta_jacobi_domain():
    with pytest.raises(DomainError):
        theta_jacobi(0.0)


def test_trace_kernel_self_dual():
    for D in (1.0 / (4 * math.pi), 1.0, 3.7):
        s = SelfDualScale(D)
        assert math.isclose(s.L**2, 4 * math.pi * s.D, rel_tol=1e-15)
        assert abs(trace_kernel_KL(1.0, s) - THETA_1) < 1e-15
    t = 3.0
    assert abs(trace_kernel_KL(t) - t**-0.5 * trace_kernel_KL(1 / t)) < 1e-12
    # divergence like t^{-1/2} at small t
    assert abs(trace_kernel_KL(1e-4) * 1e-2 - 1.0) < 1e-12


def test_trace_kernel_non_self_dual_scale():
    sc = MacroScale(L=2.0, D=1.0)
    assert abs(trace_kernel_KL(0.7, sc) - _brute_theta(0.7 * math.pi)) < 1e-14


def test_arch_completion_examples():
    t = np.array([0.5, 1.0, 3.0])
    assert np.all(arch_completion_apply(lambda x: np.ones_like(x), t) == 0.0)
    assert np.max(np.abs(arch_completion_apply(lambda x: x**-0.5, t))) < 1e-8
    assert abs(arch_completion_apply(lambda x: x**2, 1.0) - 5.0) < 1e-9
    with pytest.raises(DomainError):
        arch_completion_apply(lambda x: x, 1.0, h=0.6)


@pytest.mark.parametrize("t,ref", BIG_THETA.items())
def test_theta_completed_values(t, ref):
    assert abs(theta_completed(t) - ref) < 1e-14


def test_theta_completed_equals_numeric_completion():
    t = np.geomspace(0.2, 5.0, 9)
    numeric = arch_completion_apply(lambda x: theta_jacobi(x) - 1.0, t)
    assert np.max(np.abs(numeric - theta_completed(t))) < 1e-8


def test_theta_completed_self_reciprocity():
    # Theta(1/t) = t^{3/2} Theta(t)
    t = np.geomspace(0.1, 10.0, 25)
    assert np.max(np.abs(theta_completed(1 / t) - t**1.5 * theta_completed(t))) < 1e-12


def test_theta_completed_extreme_arguments_are_finite():
    v = theta_completed(np.array([1e-4, 1e-2, 100.0, 1e4]))
    assert np.all(np.isfinite(v))
    assert v[0] == 0.0 and v[-1] == 0.0


def test_theta_derivative_matches_finite_difference():
    for t in (0.4, 1.0, 2.2):
        h = 1e-5 * t
        fd = (theta_completed(t + h) - theta_completed(t - h)) / (2 * h)
        assert abs(theta_completed_derivative(t) - fd) < 1e-7


def test_centered_kernel_examples():
    ck = centered_kernels(5.0)
    assert abs(ck.Ktilde_star - (-0.447213294096502849690682659067)) < 1e-15
    # K~* tends to 0 only like -t^{-1/2}; what is exponentially small is K~* + t^{-1/2}
    assert abs(ck.Ktilde_star + 5**-0.5) <= 2 * math.exp(-5 * math.pi) * (1 + 1e-9)
    small = centered_kernels(0.01)
    assert abs(small.Ktilde_star - (-1.0 + 2 * 0.01**-0.5 * math.exp(-math.pi / 0.01))) < 1e-10
    t = 2.0
    assert abs(centered_kernels(1 / t).Ktilde_star - math.sqrt(t) * centered_kernels(t).Ktilde_star) < 1e-12
    # defining relations between the four kernels
    c = centered_kernels(0.7)
    assert c.Ktilde_star == c.Ktilde - 1.0 or abs(c.Ktilde_star - (c.Ktilde - 1.0)) < 1e-16
    assert abs(c.Ktilde_sym - 0.7**-0.5 * c.Ktilde) < 1e-15


def test_centered_kernel_functional_equation_brute_force():
    t = np.geomspace(0.1, 10.0, 30)
    ks = np.array([_brute_theta(v, 300) - 1 - v**-0.5 for v in t])
    ki = np.array([_brute_theta(1 / v, 300) - 1 - v**0.5 for v in t])
    assert np.max(np.abs(ki - np.sqrt(t) * ks)) < 1e-12
    assert np.max(np.abs(centered_kernels(t).Ktilde_star - ks)) < 1e-12


@pytest.mark.parametrize("x,ref", PHI.items())
def test_phi_star_values(x, ref):
    assert abs(phi_star(x) - ref) < 1e-14 * max(1.0, abs(ref))


def test_phi_star_tail_bound_constant():
    x = np.linspace(0.0, 20.0, 201)
    prod = np.abs(phi_star(x)) * np.exp(0.75 * x)
    assert np.all(prod <= 1.0 + 1e-12)
    assert abs(prod[-1] - 1.0) < 1e-12


def test_phi_star_extreme_x_finite():
    v = phi_star(np.array([-700.0, 700.0, -2000.0]))
    assert np.all(np.isfinite(v))
    assert v[2] == pytest.approx(-math.exp(500.0), rel=1e-14)
    with pytest.raises(OverflowError):
        phi_star(-3000.0)


def test_twist_exponent_is_one():
    for x in (0.5, 1.0, 3.0, 6.0):
        assert abs(twist_exponent(x) - 1.0) < 1e-12
        assert abs(twist_residual(x, 1.0)) < 1e-10 * abs(phi_star(-x))
    # the alternative exponent leaves a large residual
    assert abs(twist_residual(1.0, -0.5)) > 0.1
    assert abs(twist_residual(1e-9, -0.5)) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.floats(0.5, 3.0))
def test_twist_exponent_constant(x):
    assert abs(twist_exponent(x) - twist_exponent(0.5)) < 1e-6


def test_f_theta():
    assert abs(f_theta(0.0) - 0.0864348112133080145753161215102) < 1e-15
    assert 0 <= f_theta(3.0) <= 2 * math.exp(-1.5) * math.exp(-math.pi * math.exp(3)) * (1 + 1e-9)
    with pytest.raises(DomainError):
        f_theta(-1.0)
    y = 0.8
    h = 1e-6
    assert abs(f_theta_derivative(y) - (f_theta(y + h) - f_theta(y - h)) / (2 * h)) < 1e-8


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 50))
def test_f_theta_nonnegative(y):
    assert f_theta(y) >= 0.0


def test_gaussian_sums():
    assert abs(gaussian_sum(1.0, 4) - 0.0432697157840410236658016608979) < 1e-15
    rep = gaussian_sum_bound_check(0, np.geomspace(0.01, 1.0, 30))
    assert rep.small_t_constant <= 1.0
    assert math.isnan(rep.large_t_constant) or rep.large_t_constant < 1
    big = gaussian_sum_bound_check(3, [10.0])
    assert big.large_t_constant <= math.exp(-10 * math.pi) * (1 + 1e-12)
    with pytest.raises(ValueError):
        gaussian_sum_bound_check(0, [])


def test_gaussian_sum_matches_mpmath():
    for a, t in ((0, 0.05), (2, 0.3), (6, 2.0)):
        ref = mpmath.nsum(lambda n: n**a * mpmath.e ** (-mpmath.pi * n * n * t), [1, mpmath.inf])
        assert abs(gaussian_sum(t, a) - float(ref)) < 1e-13 * float(ref)


def test_policy_tightening_changes_nothing_visible():
    tight = TruncationPolicy().tightened()
    assert tight.tail_tol == pytest.approx(1e-18)
    assert abs(theta_completed(0.37, tight) - theta_completed(0.37)) < 1e-16


def test_dual_representations_agree():
    t = np.geomspace(0.3, 3.0, 40)
    d = theta_completed(t, method="direct")
    i = theta_completed(t, method="inverted")
    assert np.max(np.abs(d - i)) < 1e-12


def test_rapid_decay_products_bounded():
    A = 5
    small = np.geomspace(0.01, 1.0, 200)
    large = np.geomspace(1.0, 50.0, 200)
    ps = np.abs(theta_completed(small)) * small**-A
    pl = np.abs(theta_completed(large)) * large**A
    assert ps.max() < 20 and pl.max() < 5
    assert ps[0] < 1e-100 and pl[-1] < 1e-50


def test_module_has_switch_at_one():
    assert theta.T_SWITCH == 1.0
