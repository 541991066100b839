"""Theta-series kernels at the self-dual scale.

Every series is summed with a rigorous Gaussian tail bound.  Below the
representation switch ``t = 1`` the Jacobi-inverted series is used, since the
direct series both needs many terms and cancels catastrophically there.

Functions accept scalars or arrays; ``return_bound=True`` additionally returns
the achieved tail bound (same shape as the value).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "SelfDualScale",
    "MacroScale",
    "TruncationPolicy",
    "KernelSample",
    "CenteredKernels",
    "GaussianSumBound",
    "theta_jacobi",
    "trace_kernel_KL",
    "arch_completion_apply",
    "theta_completed",
    "theta_completed_derivative",
    "centered_kernels",
    "phi_star",
    "twist_residual",
    "twist_exponent",
    "f_theta",
    "f_theta_derivative",
    "gaussian_sum",
    "gaussian_sum_bound_check",
]

PI = math.pi
T_SWITCH = 1.0


@dataclass(frozen=True)
class TruncationPolicy:
    """Series cutoff control: stop once the tail bound is below ``tail_tol``."""

    tail_tol: float = 1e-17
    n_max: int = 400

    def __post_init__(self):
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    def tightened(self, factor=10.0):
        return TruncationPolicy(self.tail_tol / factor, self.n_max)


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class MacroScale:
    """Macroscopic length ``L`` and diffusion constant ``D`` (unconstrained)."""

    L: float
    D: float

    @property
    def rate(self):
        """Ratio ``4 pi D / L**2`` mapping ``t`` to the Jacobi variable."""
        return 4.0 * PI * self.D / self.L**2


class SelfDualScale(MacroScale):
    """The unique scale with ``L**2 = 4 pi D``; constructed from ``D``."""

    def __init__(self, D=1.0 / (4.0 * PI)):
        if not D > 0:
            raise ValueError("D must be positive")
        super().__init__(L=math.sqrt(4.0 * PI * D), D=D)

    @property
    def rate(self):
        return 1.0

    def __repr__(self):
        return f"SelfDualScale(D={self.D!r}, L={self.L!r})"


@dataclass(frozen=True)
class KernelSample:
    t: float
    value: float
    achieved_tail_bound: float


@dataclass(frozen=True)
class CenteredKernels:
    Ktilde: np.ndarray
    Ktilde_star: np.ndarray
    Ktilde_sym: np.ndarray
    Ktilde_star_sym: np.ndarray


def _asfloat(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _ret(value, bound, scalar, return_bound):
    if scalar:
        value = float(np.asarray(value).reshape(()))
        bound = float(np.asarray(bound).reshape(()))
    return (value, bound) if return_bound else value


def _tail_bound(m, u, alpha):
    """Bound on sum_{n > m} n**alpha exp(-pi n**2 u), or inf if not yet geometric."""
    n0 = m + 1
    first = n0**alpha * np.exp(-PI * n0 * n0 * u)
    ratio = ((n0 + 1) / n0) ** alpha * np.exp(-PI * (2 * n0 + 1) * u)
    with np.errstate(divide="ignore"):
        return np.where(ratio < 1.0, first / (1.0 - ratio), np.inf)


def _terms_needed(u_min, alpha, tol, pol):
    """Smallest cutoff m whose tail bound (times a prefactor absorbed in tol) is <= tol."""
    for m in range(1, pol.n_max + 1):
        if _tail_bound(m, u_min, alpha) <= tol:
            return m
    return pol.n_max


def _moment_sums(u, alphas, tol, pol):
    """sum_{n>=1} n**alpha exp(-pi n**2 u) for each alpha, plus tail bounds.

    ``u`` is a positive array; the cutoff is driven by the smallest entry.
    """
    u_min = float(np.min(u)) if u.size else 1.0
    a_max = max(alphas)
    m = _terms_needed(u_min, a_max, tol, pol)
    n = np.arange(1, m + 1, dtype=float)
    expo = np.exp(-PI * np.multiply.outer(u, n * n))
    sums = [expo @ n**a for a in alphas]
    bounds = [_tail_bound(m, u, a) for a in alphas]
    return sums, bounds


def gaussian_sum(t, alpha=0, pol=DEFAULT_POLICY, return_bound=False):
    """Direct evaluation of ``sum_{n>=1} n**alpha exp(-pi n**2 t)``."""
    t, scalar = _asfloat(t)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    (s,), (b,) = _moment_sums(t, [alpha], pol.tail_tol, pol)
    return _ret(s, b, scalar, return_bound)


def theta_jacobi(u, pol=DEFAULT_POLICY, method="auto", return_bound=False):
    """Jacobi theta ``sum_{n in Z} exp(-pi n**2 u)``.

    ``method`` is ``"auto"`` (inverted below ``u = 1``), ``"direct"`` or
    ``"inverted"``.  For very large ``u`` the result is exactly ``1.0``.
    """
    u, scalar = _asfloat(u)
    if np.any(u <= 0):
        raise DomainError("u must be positive")
    value = np.empty(u.shape)
    bound = np.empty(u.shape)
    inv = _inverted_mask(u, method)
    if np.any(~inv):
        (s,), (b,) = _moment_sums(u[~inv], [0], pol.tail_tol / 2, pol)
        value[~inv] = 1.0 + 2.0 * s
        bound[~inv] = 2.0 * b
    if np.any(inv):
        ui = u[inv]
        (s,), (b,) = _moment_sums(1.0 / ui, [0], pol.tail_tol * np.sqrt(np.min(ui)) / 2, pol)
        value[inv] = (1.0 + 2.0 * s) / np.sqrt(ui)
        bound[inv] = 2.0 * b / np.sqrt(ui)
    return _ret(value, bound, scalar, return_bound)


def _inverted_mask(t, method):
    if method == "auto":
        return t < T_SWITCH
    if method == "direct":
        return np.zeros(t.shape, dtype=bool)
    if method == "inverted":
        return np.ones(t.shape, dtype=bool)
    raise ValueError(f"unknown method {method!r}")


def trace_kernel_KL(t, scale=None, pol=DEFAULT_POLICY, method="auto", return_bound=False):
    """Scaling-limit trace ``sum_n exp(-4 pi**2 D n**2 t / L**2)``.

    At a :class:`SelfDualScale` this is ``theta_jacobi(t)``; a general
    :class:`MacroScale` rescales ``t`` by ``4 pi D / L**2`` first.
    """
    scale = SelfDualScale() if scale is None else scale
    t, scalar = _asfloat(t)
    res = theta_jacobi(t * scale.rate, pol, method=method, return_bound=True)
    return _ret(res[0], res[1], scalar, return_bound)


def arch_completion_apply(f, t, h=None, rel_step=1e-3):
    """Numerical ``d/dt (t**1.5 f'(t))`` with fourth-order central differences.

    ``f`` must accept arrays.  The stencil is ``t + k h`` for ``|k| <= 2``; by
    default ``h = rel_step * t`` so the stencil scales with ``t``.

    Raises
    ------
    DomainError
        If the stencil leaves ``(0, inf)``.
    """
    t, scalar = _asfloat(t)
    h = rel_step * t if h is None else np.broadcast_to(np.asarray(h, dtype=float), t.shape)
    if np.any(t - 2 * h <= 0):
        raise DomainError("finite-difference stencil leaves (0, inf)")
    fm2, fm1, f0, fp1, fp2 = (np.asarray(f(t + k * h), dtype=float) for k in (-2, -1, 0, 1, 2))
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h)
        d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h)
        out = t**1.5 * d2 + 1.5 * np.sqrt(t) * d1
    # a stencil of exact zeros (underflowed kernel) has zero image
    flat = (fm2 == 0) & (fm1 == 0) & (f0 == 0) & (fp1 == 0) & (fp2 == 0)
    out = np.where(flat, 0.0, out)
    return float(out) if scalar else out


def theta_completed(t, pol=DEFAULT_POLICY, method="auto", return_bound=False):
    """The completed kernel Theta = A(K_L - 1) at the self-dual scale.

    Direct form ``sum (2 pi^2 n^4 t^1.5 - 3 pi n^2 t^0.5) e^{-pi n^2 t}``; the
    inverted form applies the completion operator termwise to the Jacobi
    inverted theta series,
    ``sum (2 pi^2 n^4 t^-3 - 3 pi n^2 t^-2) e^{-pi n^2 / t}``.
    """
    t, scalar = _asfloat(t)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    value = np.empty(t.shape)
    bound = np.empty(t.shape)
    inv = _inverted_mask(t, method)
    with np.errstate(over="ignore"):
        powers = ((~inv, t, t**1.5, t**0.5), (inv, 1.0 / t, t**-3.0, t**-2.0))
    for mask, u, p4, p2 in powers:
        if not np.any(mask):
            continue
        um, a, b = u[mask], p4[mask], p2[mask]
        with np.errstate(over="ignore"):
            scale = float(np.max(2 * PI**2 * a + 3 * PI * b))
        scale = min(scale, 1e300)
        (s4, s2), (b4, b2) = _moment_sums(um, [4, 2], pol.tail_tol / max(scale, 1.0), pol)
        with np.errstate(over="ignore", invalid="ignore"):
            v = 2 * PI**2 * a * s4 - 3 * PI * b * s2
            bd = 2 * PI**2 * a * b4 + 3 * PI * b * b2
        # underflowed series times an overflowing power is zero
        gone = (s4 == 0) & (s2 == 0)
        value[mask] = np.where(gone, 0.0, v)
        bound[mask] = np.where(gone, 0.0, bd)
    return _ret(value, bound, scalar, return_bound)


def theta_completed_derivative(t, pol=DEFAULT_POLICY):
    """Termwise derivative of :func:`theta_completed`."""
    t, scalar = _asfloat(t)
    out = np.empty(t.shape)
    inv = t < T_SWITCH
    if np.any(~inv):
        x = t[~inv]
        (s2, s4, s6), _ = _moment_sums(x, [2, 4, 6], pol.tail_tol, pol)
        out[~inv] = (
            3 * PI**2 * np.sqrt(x) * s4
            - 1.5 * PI / np.sqrt(x) * s2
            - 2 * PI**3 * x**1.5 * s6
            + 3 * PI**2 * np.sqrt(x) * s4
        )
    if np.any(inv):
        x = t[inv]
        (s2, s4, s6), _ = _moment_sums(1.0 / x, [2, 4, 6], pol.tail_tol, pol)
        out[inv] = (
            -6 * PI**2 * x**-4 * s4
            + 6 * PI * x**-3 * s2
            + 2 * PI**3 * x**-5 * s6
            - 3 * PI**2 * x**-4 * s4
        )
    return float(out) if scalar else out


def _kstar(t, pol):
    """K_L(t) - 1 - t**-0.5 in cancellation-free form, with tail bound."""
    value = np.empty(t.shape)
    bound = np.empty(t.shape)
    inv = t < T_SWITCH
    if np.any(~inv):
        (s,), (b,) = _moment_sums(t[~inv], [0], pol.tail_tol / 2, pol)
        value[~inv] = 2.0 * s - 1.0 / np.sqrt(t[~inv])
        bound[~inv] = 2.0 * b
    if np.any(inv):
        ti = t[inv]
        (s,), (b,) = _moment_sums(1.0 / ti, [0], pol.tail_tol * np.sqrt(np.min(ti)) / 2, pol)
        value[inv] = 2.0 * s / np.sqrt(ti) - 1.0
        bound[inv] = 2.0 * b / np.sqrt(ti)
    return value, bound


def centered_kernels(t, pol=DEFAULT_POLICY):
    """The centered kernels K~ = K_L - t^-1/2, K~* = K~ - 1 and their half-densities."""
    t, scalar = _asfloat(t)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    kstar, _ = _kstar(t, pol)
    ktilde = kstar + 1.0
    half = 1.0 / np.sqrt(t)
    vals = (ktilde, kstar, half * ktilde, half * kstar)
    if scalar:
        vals = tuple(float(v) for v in vals)
    return CenteredKernels(*vals)


def phi_star(x, pol=DEFAULT_POLICY, return_bound=False):
    """Logarithmic centered kernel ``exp(-x/4) K~*(exp(x))`` for real ``x``.

    Evaluated without ever forming ``exp(|x|)``-sized intermediates:
    ``x >= 0``: ``2 e^{-x/4} S(e^x) - e^{-3x/4}``;
    ``x < 0``: ``2 e^{-3x/4} S(e^{-x}) - e^{-x/4}``, with ``S(u) = sum_{n>=1} e^{-pi n^2 u}``.

    Raises
    ------
    OverflowError
        If the value itself is not representable (``x`` below about -2839).
    """
    x, scalar = _asfloat(x)
    value = np.empty(x.shape)
    bound = np.empty(x.shape)
    ax = np.abs(x)
    u = np.exp(np.minimum(ax, 700.0))
    (s,), (b,) = _moment_sums(u, [0], pol.tail_tol / 2, pol)
    pos = x >= 0
    value[pos] = 2.0 * np.exp(-x[pos] / 4) * s[pos] - np.exp(-0.75 * x[pos])
    bound[pos] = 2.0 * np.exp(-x[pos] / 4) * b[pos]
    neg = ~pos
    with np.errstate(over="ignore", invalid="ignore"):
        pre = 2.0 * np.exp(-0.75 * x[neg])
        # an underflowed series contributes nothing even when pre overflows
        value[neg] = np.where(s[neg] == 0, 0.0, pre * s[neg]) - np.exp(-x[neg] / 4)
        bound[neg] = np.where(b[neg] == 0, 0.0, pre * b[neg])
    if not np.all(np.isfinite(value)):
        raise OverflowError("phi_star overflows, |phi_star(x)| ~ exp(-x/4) for x < -2800")
    return _ret(value, bound, scalar, return_bound)


def twist_residual(x, beta, pol=DEFAULT_POLICY):
    """``phi_star(-x) - exp(beta x) phi_star(x)`` for a trial exponent ``beta``."""
    x, scalar = _asfloat(x)
    out = phi_star(-x, pol) - np.exp(beta * x) * phi_star(x, pol)
    return float(out) if scalar else out


def twist_exponent(x, pol=DEFAULT_POLICY):
    """Empirical exponent ``log(phi_star(-x) / phi_star(x)) / x``."""
    x, scalar = _asfloat(x)
    out = np.log(phi_star(-x, pol) / phi_star(x, pol)) / x
    return float(out) if scalar else out


def f_theta(y, pol=DEFAULT_POLICY, return_bound=False):
    """Appendix kernel ``2 e^{-y/2} sum_{n>=1} exp(-pi n^2 e^y)`` on ``y >= 0``."""
    y, scalar = _asfloat(y)
    if np.any(y < 0):
        raise DomainError("f_theta is defined for y >= 0")
    u = np.exp(np.minimum(y, 700.0))
    (s,), (b,) = _moment_sums(u, [0], pol.tail_tol / 2, pol)
    pre = 2.0 * np.exp(-y / 2)
    return _ret(pre * s, pre * b, scalar, return_bound)


def f_theta_derivative(y, pol=DEFAULT_POLICY):
    """Termwise derivative of :func:`f_theta`."""
    y, scalar = _asfloat(y)
    if np.any(y < 0):
        raise DomainError("f_theta is defined for y >= 0")
    u = np.exp(np.minimum(y, 700.0))
    (s0, s2), _ = _moment_sums(u, [0, 2], pol.tail_tol / 2, pol)
    pre = 2.0 * np.exp(-y / 2)
    out = pre * (-0.5 * s0 - PI * u * s2)
    return float(out) if scalar else out


@dataclass(frozen=True)
class GaussianSumBound:
    alpha: int
    small_t_constant: float
    large_t_constant: float
    sums: tuple
    t_grid: tuple


def gaussian_sum_bound_check(alpha, t_grid, pol=DEFAULT_POLICY):
    """Empirical constants in ``sum n^a e^{-pi n^2 t} <~ t^{-(a+1)/2}`` (t <= 1) and ``<~ 1`` (t >= 1).

    A constant is ``nan`` when no grid point falls in its regime.
    """
    t = np.asarray(sorted(t_grid), dtype=float)
    if t.size == 0:
        raise ValueError("t_grid must be non-empty")
    sums = gaussian_sum(t, alpha, pol)
    small = t <= 1.0
    c_small = float(np.max(sums[small] * t[small] ** ((alpha + 1) / 2))) if np.any(small) else math.nan
    c_large = float(np.max(sums[~small])) if np.any(~small) else math.nan
    return GaussianSumBound(alpha, c_small, c_large, tuple(float(s) for s in sums), tuple(float(v) for v in t))
