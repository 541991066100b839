"""Continuous-time nearest-neighbour walk on the N-cycle and its spectral determinant.

The heat kernel is always the exact finite Fourier sum over the spectrum; there
is no time stepping.  The determinant ``P_N(w) = prod_k (q_N(w) - lambda_k)`` is
available in plain form and in log form (log-magnitude plus summed argument),
since its value overflows for large ``N``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .theta import DEFAULT_POLICY, MacroScale, trace_kernel_KL

__all__ = [
    "CycleModel",
    "SpectralFamily",
    "DeterminantZeros",
    "ULCLTReport",
    "eigenvalues",
    "heat_kernel",
    "heat_kernel_profile",
    "gaussian_density",
    "wrapped_gaussian",
    "fourier_gaussian_sum",
    "ulclt_report",
    "scaling_limit_residual",
    "q_tilde",
    "P_N",
    "P_N_log",
    "determinant_zeros",
]


@dataclass(frozen=True)
class CycleModel:
    """Cycle of ``N`` sites with uniform conductance ``a``; diffusion ``D = a``."""

    N: int
    a: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 3:
            raise ValueError("N must be an integer >= 3")
        if not self.a > 0:
            raise ValueError("conductance a must be positive")

    @property
    def D(self):
        return self.a


@dataclass(frozen=True)
class SpectralFamily:
    N: int
    eigenvalues: tuple

    @property
    def array(self):
        return np.asarray(self.eigenvalues)


@dataclass(frozen=True)
class DeterminantZeros:
    """Zeros of ``P_N`` in ``|Re w| <= N/2``, with multiplicities.

    Both edges ``Re w = +-N/2`` are listed, so zeros there appear twice modulo
    the period ``N``.
    """

    N: int
    zeros: tuple
    multiplicities: tuple
    max_imag: float
    max_factor_residual: float

    def real_zeros(self, imag_tol=1e-12):
        return [z for z in self.zeros if abs(z.imag) <= imag_tol]

    def count_in(self, T, include_origin=False, imag_tol=1e-12):
        """Number of real zeros with ``|w| <= T``, counted with multiplicity."""
        total = 0
        for z, m in zip(self.zeros, self.multiplicities):
            if abs(z.imag) > imag_tol or abs(z.real) > T:
                continue
            if z == 0 and not include_origin:
                continue
            total += m
        return total


@dataclass(frozen=True)
class ULCLTReport:
    N: int
    t: float
    sup_error: float
    j_at_sup: int
    in_window: bool


@lru_cache(maxsize=64)
def _spectrum(N):
    k = np.arange(N)
    # 4 sin^2(pi k / N) avoids cancellation near k = 0
    lam = 4.0 * np.sin(np.pi * k / N) ** 2
    lam.setflags(write=False)
    return lam


def eigenvalues(model):
    """``lambda_k = 2 - 2 cos(2 pi k / N)`` for ``k = 0..N-1``."""
    return SpectralFamily(model.N, tuple(float(v) for v in _spectrum(model.N)))


def heat_kernel(model, t, j):
    """Transition probability ``p_t(0, j)`` from the exact Fourier sum.

    ``j`` may be an integer or an integer array.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    N = model.N
    lam = _spectrum(N)
    weights = np.exp(-model.a * t * lam)
    jj = np.asarray(j, dtype=np.int64)
    k = np.arange(N, dtype=np.int64)
    # exact phase reduction modulo N before scaling by 2 pi / N
    phase = np.mod(np.multiply.outer(jj, k), N) * (2.0 * math.pi / N)
    out = (np.cos(phase) @ weights) / N
    return float(out) if jj.ndim == 0 else out


def heat_kernel_profile(model, t):
    """``p_t(0, j)`` for every ``j = 0..N-1`` via one inverse FFT."""
    weights = np.exp(-model.a * t * _spectrum(model.N))
    return np.fft.ifft(weights).real


def gaussian_density(model, t, x):
    """Unwrapped Gaussian ``(4 pi D t)^{-1/2} exp(-x^2 / (4 D t))``."""
    dt = model.D * t
    return np.exp(-np.asarray(x, dtype=float) ** 2 / (4.0 * dt)) / math.sqrt(4.0 * math.pi * dt)


def wrapped_gaussian(model, t, j, m_max=None, return_bound=False):
    """Periodised Gaussian ``sum_{|m| <= m_max} g(j + m N)``.

    With ``m_max=None`` the cutoff is chosen so the dropped tail is below 1e-17.
    """
    N, dt = model.N, model.D * t
    jr = float(np.mod(j, N))
    if jr > N / 2:
        jr -= N
    if m_max is None:
        m_max = 1
        while _wrapped_tail(m_max, jr, N, dt) > 1e-17:
            m_max += 1
    m = np.arange(-m_max, m_max + 1)
    val = float(gaussian_density(model, t, jr + m * N).sum())
    bound = _wrapped_tail(m_max, jr, N, dt)
    return (val, bound) if return_bound else val


def _wrapped_tail(m_max, jr, N, dt):
    # both tails, each a geometric-dominated Gaussian sum starting at |x| >= m_max N + N/2 - |jr|
    x0 = (m_max + 1) * N - abs(jr)
    first = math.exp(-x0 * x0 / (4.0 * dt)) / math.sqrt(4.0 * math.pi * dt)
    ratio = math.exp(-(2.0 * x0 * N + N * N) / (4.0 * dt))
    return 2.0 * first / (1.0 - ratio) if ratio < 1 else math.inf


def fourier_gaussian_sum(model, t, j, k_max=None):
    """``(1/N) sum_k exp(-4 pi^2 D t k^2 / N^2) exp(2 pi i k j / N)`` over all integers ``k``."""
    N, dt = model.N, model.D * t
    if k_max is None:
        # terms below 1e-18 of the k = 0 term
        k_max = int(math.ceil(N * math.sqrt(42.0 / (4.0 * math.pi**2 * dt)))) + 1
    k = np.arange(1, k_max + 1)
    w = np.exp(-4.0 * math.pi**2 * dt * (k / N) ** 2)
    phase = np.mod(k * int(j), N) * (2.0 * math.pi / N)
    return float((1.0 + 2.0 * np.dot(w, np.cos(phase))) / N)


def ulclt_report(model, t, window=(0.5, 2.0)):
    """Sup over ``|j| <= N/2`` of ``|p_t(0, j) - g_t(j)|`` with the unwrapped Gaussian ``g_t``."""
    N = model.N
    j = np.arange(-(N // 2), N // 2 + 1)
    diff = np.abs(heat_kernel(model, t, j) - gaussian_density(model, t, j))
    i = int(np.argmax(diff))
    return ULCLTReport(N, float(t), float(diff[i]), int(j[i]), bool(window[0] <= t <= window[1]))


def scaling_limit_residual(N, t, L=None, a=1.0, pol=DEFAULT_POLICY):
    """``|N p_{s^2 t}(0, 0) - K_L(t)|`` with ``s = N / L``.

    ``L`` defaults to the self-dual length ``sqrt(4 pi D)``.
    """
    model = CycleModel(N, a)
    L = math.sqrt(4.0 * math.pi * model.D) if L is None else float(L)
    s = N / L
    trace = N * heat_kernel(model, s * s * t, 0)
    return abs(trace - trace_kernel_KL(t, MacroScale(L, model.D), pol))


def q_tilde(N, w):
    """Rescaled spectral map ``(N/pi)^2 sin^2(pi w / N)``; entire, tends to ``w^2``."""
    w = np.asarray(w, dtype=complex)
    out = (N / math.pi) ** 2 * np.sin(math.pi * w / N) ** 2
    return complex(out) if out.ndim == 0 else out


def P_N(N, w):
    """Spectral determinant ``prod_k (q_N(w) - lambda_k)``.

    Raises
    ------
    OverflowError
        If the product is not representable; use :func:`P_N_log`.
    """
    w = np.asarray(w, dtype=complex)
    q = q_tilde(N, w)
    with np.errstate(over="ignore", invalid="ignore"):
        out = np.prod(np.subtract.outer(np.asarray(q), _spectrum(N)), axis=-1)
    if not np.all(np.isfinite(out)):
        raise OverflowError("P_N overflows; use P_N_log")
    return complex(out) if out.ndim == 0 else out


def P_N_log(N, w):
    """``(log|P_N(w)|, sum_k arg(q_N(w) - lambda_k))``; ``-inf`` magnitude at zeros."""
    w = np.asarray(w, dtype=complex)
    fac = np.subtract.outer(np.asarray(q_tilde(N, w)), _spectrum(N))
    with np.errstate(divide="ignore"):
        logmag = np.log(np.abs(fac)).sum(axis=-1)
    arg = np.angle(fac).sum(axis=-1)
    if logmag.ndim == 0:
        return float(logmag), float(arg)
    return logmag, arg


def determinant_zeros(N, zero_tol=1e-8):
    """All zeros of ``P_N`` with ``|Re w| <= N/2`` by closed-form arcsine inversion.

    Each factor vanishes where ``sin(pi w / N) = +-c_k``, ``c_k = (2 pi / N) sin(pi k / N)``.
    For ``c_k > 1`` the solutions sit on ``Re w = +-N/2`` with imaginary part
    ``+-(N/pi) arccosh(c_k)``.  Multiplicities count the factor pairs ``k, N - k``.
    """
    if N < 3:
        raise ValueError("N must be >= 3")
    found = {}
    worst = 0.0
    lam = _spectrum(N)
    for k in range(N):
        c = (2.0 * math.pi / N) * math.sin(math.pi * k / N)
        if c <= 1.0:
            base = [(N / math.pi) * math.asin(c) + 0j]
        else:
            y = (N / math.pi) * math.acosh(c)
            base = [complex(N / 2.0, y), complex(N / 2.0, -y)]
        pts = set()
        for b in base:
            pts.add(b)
            pts.add(-b)
        for z in pts:
            worst = max(worst, abs(q_tilde(N, z) - lam[k]))
            key = (round(z.real, 12) + 0.0, round(z.imag, 12) + 0.0)
            # a zero with c = 0 is a double root of sin^2; the pair +-b collapses
            mult = 2 if (c == 0.0 or c == 1.0) else 1
            exact, m = found.get(key, (z, 0))
            found[key] = (exact, m + mult)
    keys = sorted(found)
    zeros = tuple(found[k][0] for k in keys)
    mults = tuple(found[k][1] for k in keys)
    max_imag = max((abs(z.imag) for z in zeros), default=0.0)
    if worst >= zero_tol * max(1.0, float(np.max(lam))):
        raise ArithmeticError(f"factor residual {worst} above zero_tol")
    return DeterminantZeros(int(N), zeros, mults, float(max_imag), float(worst))
