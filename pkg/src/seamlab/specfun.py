"""Complex special functions: log-Gamma, zeta, the completed xi and Xi.

All functions accept scalars or array-likes and return values of the same
shape (Python ``complex`` for scalar input).  Zeta uses Euler--Maclaurin
summation on ``Re s >= -1/2`` and the functional equation to the left of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import PoleError

__all__ = [
    "ZeroList",
    "log_gamma",
    "zeta",
    "zeta_with_error",
    "xi_completed",
    "Xi",
    "locate_real_zeros",
]

_EULER_GAMMA = 0.57721566490153286060651209008240243
_STIELTJES_1 = -0.072815845483676724860586375874901320
_LOG_PI = math.log(math.pi)
_LOG_2 = math.log(2.0)

# Euler--Maclaurin correction constants B_{2k} / (2k)!, k = 1..24.
_EM_TERMS = 24
_B = special.bernoulli(2 * _EM_TERMS + 2)
_EM_COEF = np.array(
    [_B[2 * k] / math.factorial(2 * k) for k in range(1, _EM_TERMS + 2)]
)


@dataclass(frozen=True)
class ZeroList:
    """Ordinates of sign changes of Xi on the positive real axis."""

    ordinates: tuple
    bracket_width: float

    def __len__(self):
        return len(self.ordinates)

    def __iter__(self):
        return iter(self.ordinates)


def _as_complex(x):
    arr = np.asarray(x, dtype=complex)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    if scalar:
        arr = np.asarray(arr)
        return complex(arr.reshape(()))
    return arr


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Raises
    ------
    PoleError
        If any ``z`` is a non-positive integer.
    """
    z, scalar = _as_complex(z)
    zr = z.real
    if np.any((z.imag == 0) & (zr <= 0) & (zr == np.round(zr))):
        raise PoleError("log_gamma has poles at the non-positive integers")
    return _out(special.loggamma(z), scalar)


def _zeta_em(s):
    """Euler--Maclaurin zeta for an array of ``s`` with ``Re s >= -1/2``.

    Returns (value, error_estimate).
    """
    if s.size == 0:
        return s.copy(), np.zeros(s.shape)
    big = float(np.max(np.abs(s)))
    n_terms = 20 + int(math.ceil(big / 2.0))
    n = np.arange(1, n_terms, dtype=float)
    log_n = np.log(n)
    flat = s.reshape(-1)
    head = np.exp(-np.outer(flat, log_n)).sum(axis=1)
    # rounding floor: the head sum has no cancellation for Re s >= 0 and is mild down to -1/2
    absum = np.exp(-np.outer(flat.real, log_n)).sum(axis=1)

    big_n = float(n_terms)
    n_pow = np.exp(-flat * math.log(big_n))  # N^{-s}
    total = head + 0.5 * n_pow + big_n * n_pow / (flat - 1.0)
    fac = flat * n_pow / big_n  # s * N^{-s-1}
    for k in range(1, _EM_TERMS + 1):
        total = total + _EM_COEF[k - 1] * fac
        fac = fac * (flat + 2 * k - 1) * (flat + 2 * k) / big_n**2
    nxt = np.abs(_EM_COEF[_EM_TERMS] * fac)
    sig = flat.real + 2 * _EM_TERMS + 1
    remainder = nxt * np.abs(flat + 2 * _EM_TERMS + 1) / sig
    err = remainder + 4e-16 * (absum + np.abs(total))
    return total.reshape(s.shape), err.reshape(s.shape)


def zeta_with_error(s):
    """Riemann zeta with an estimated absolute error.

    Returns
    -------
    (value, error) : tuple of array or scalar
    """
    s, scalar = _as_complex(s)
    if np.any(s == 1.0):
        raise PoleError("zeta has a pole at s = 1")
    value = np.empty(s.shape, dtype=complex)
    error = np.empty(s.shape, dtype=float)
    # Euler--Maclaurin stays accurate slightly left of 0; reflecting tiny
    # negative s would evaluate zeta(1 - s) with 1 - s rounded to the pole
    left = s.real < -0.5
    right = ~left
    if np.any(right):
        value[right], error[right] = _zeta_em(s[right])
    if np.any(left):
        sl = s[left]
        refl, refl_err = _zeta_em(1.0 - sl)
        pref = np.exp(sl * _LOG_2 + (sl - 1.0) * _LOG_PI + special.loggamma(1.0 - sl))
        pref = pref * np.sin(0.5 * np.pi * sl)
        value[left] = pref * refl
        error[left] = np.abs(pref) * refl_err + 1e-15 * np.abs(value[left])
    if scalar:
        return complex(value.reshape(())), float(error.reshape(()))
    return value, error


def zeta(s):
    """Analytic continuation of sum n^{-s}; ``PoleError`` at ``s = 1``."""
    return zeta_with_error(s)[0]


def _xi_direct(w):
    # xi(w) = (w - 1) pi^{-w/2} Gamma(w/2 + 1) zeta(w): the w = 0 singularity
    # is absorbed into Gamma(w/2 + 1); w = 1 uses the Laurent expansion.
    near_one = np.abs(w - 1.0) < 1e-6
    d = w - 1.0
    wm1_zeta = np.empty(w.shape, dtype=complex)
    if np.any(near_one):
        dd = d[near_one]
        wm1_zeta[near_one] = 1.0 + _EULER_GAMMA * dd - _STIELTJES_1 * dd * dd
    far = ~near_one
    if np.any(far):
        wm1_zeta[far] = d[far] * zeta_with_error(w[far])[0]
    gam = np.exp(special.loggamma(0.5 * w + 1.0) - 0.5 * w * _LOG_PI)
    return gam * wm1_zeta


def xi_completed(w):
    """Completed zeta function 1/2 w (w-1) pi^{-w/2} Gamma(w/2) zeta(w); entire."""
    w, scalar = _as_complex(w)
    out = np.empty(w.shape, dtype=complex)
    # Re w < -1 would meet the Gamma(w/2 + 1) poles at -2, -4, ...
    refl = w.real < -1.0
    if np.any(refl):
        out[refl] = _xi_direct(1.0 - w[refl])
    if np.any(~refl):
        out[~refl] = _xi_direct(w[~refl])
    return _out(out, scalar)


def Xi(z):
    """Riemann Xi function, ``xi(1/2 + i z)``; real and even on the real axis."""
    z, scalar = _as_complex(z)
    return _out(np.asarray(xi_completed(0.5 + 1j * z)), scalar)


def locate_real_zeros(z_max, tol=1e-10, step=0.05):
    """Bracket and bisect every sign change of Xi on ``(0, z_max]``.

    Parameters
    ----------
    z_max : float
        Right end of the scanned interval.
    tol : float
        Final bracket width.
    step : float
        Scan grid spacing.  Zeros of Xi below ordinate 100 are separated
        by more than 0.5, so the default cannot miss a simple zero pair.
    """
    if z_max <= 0 or tol <= 0:
        raise ValueError("z_max and tol must be positive")
    n = max(2, int(math.ceil(z_max / step)) + 1)
    grid = np.linspace(0.0, z_max, n)
    vals = Xi(grid).real
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    lo = grid[idx].copy()
    hi = grid[idx + 1].copy()
    flo = vals[idx].copy()
    exact = vals == 0.0
    exact[0] = False
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = Xi(mid).real
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    roots = list(0.5 * (lo + hi)) + list(grid[exact])
    return ZeroList(tuple(sorted(float(r) for r in roots)), float(tol))
