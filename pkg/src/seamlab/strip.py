"""Seam ratio, boundary separation, sector and zero-count scans on strip rectangles.

The seam ratio is ``Xi(2w) / (U(w) P_N(w))`` for a pluggable unit ``U``
(default: the bridge unit ``pi (4 w^2 + 1) / 8``).  All evaluation is in log
form, so large ``N`` is no obstacle.  Scan outcomes are measurements; none of
them is asserted true or false by this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import StripRectangle, log_form, log_product, log_quotient, trace_boundary, winding_number
from .cycle import P_N_log, _spectrum, determinant_zeros, q_tilde
from .errors import DegenerateUnit, DomainError, PoleAtZeroOfPN
from .specfun import Xi
from .transforms import bridge_unit

__all__ = [
    "SeamValue",
    "SeparationReport",
    "SectorReport",
    "DivisorComparison",
    "Schedule",
    "default_schedule",
    "xi2_log",
    "unit_log",
    "pn_log",
    "seam_log",
    "seam_ratio",
    "separation_scan",
    "sector_scan",
    "sector_scan_function",
    "zero_divisor_compare",
]


@dataclass(frozen=True)
class SeamValue:
    log_mag: float
    arg: float

    @property
    def value(self):
        return complex(math.exp(self.log_mag) * complex(math.cos(self.arg), math.sin(self.arg)))


@dataclass(frozen=True)
class SeparationReport:
    T: float
    eta: float
    N: int
    sup_diff: float
    inf_ref: float
    holds: bool
    log_sup_diff: float
    log_inf_ref: float
    samples: int
    winding_X: int
    winding_ref: int
    rouche_consistent: bool


@dataclass(frozen=True)
class SectorReport:
    T: float
    eta: float
    theta_max: float
    theta: float
    within_sector: bool
    contains_zero_on_boundary: bool
    theta_max_by_edge: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DivisorComparison:
    T: float
    eta: float
    N: int
    winding_X: int
    real_zeros_PN_in_T: int
    match: bool
    origin_excluded: bool
    origin_multiplicity: int


class Schedule:
    """Piecewise-constant ``N(T)`` from breakpoints ``(T_i, N_i)``.

    ``N(T)`` is ``N_i`` for the first ``T_i >= T``, and the last ``N_i`` beyond
    the table.  With no breakpoints, ``N = max(7, 8 ceil(T))``.
    """

    def __init__(self, points=()):
        pts = [(float(t), int(n)) for t, n in points]
        for (t0, n0), (t1, n1) in zip(pts, pts[1:]):
            if not (t1 > t0 and n1 >= n0):
                raise ValueError("schedule must be increasing in T and non-decreasing in N")
        self.points = tuple(pts)

    def __call__(self, T):
        if not self.points:
            return default_schedule(T)
        for t, n in self.points:
            if T <= t:
                return n
        return self.points[-1][1]


def default_schedule(T):
    return max(7, 8 * int(math.ceil(T)))


def xi2_log(w):
    return log_form(lambda v: Xi(2.0 * np.asarray(v)))(w)


def unit_log(unit):
    return log_form(unit)


def pn_log(N):
    return lambda w: P_N_log(N, w)


def seam_log(N, unit=bridge_unit):
    """Log-form evaluator of ``Xi(2w) / (U(w) P_N(w))``."""
    return log_quotient(xi2_log, log_product(unit_log(unit), pn_log(N)))


def seam_ratio(w, N, unit=bridge_unit, pole_tol=1e-12):
    """Seam ratio at one point, in log form.

    Raises
    ------
    PoleAtZeroOfPN
        If some factor ``|q_N(w) - lambda_k|`` is below ``pole_tol``.
    DegenerateUnit
        If the unit vanishes at ``w``.
    """
    w = complex(w)
    fac = np.abs(q_tilde(N, w) - _spectrum(N))
    if np.min(fac) <= pole_tol:
        raise PoleAtZeroOfPN(f"P_{N} vanishes at w = {w}")
    u = complex(unit(np.asarray(w)))
    if u == 0:
        raise DegenerateUnit(f"unit vanishes at w = {w}")
    lm, ar = seam_log(N, unit)(np.asarray([w]))
    return SeamValue(float(lm[0]), float(_principal(ar[0])))


def _principal(x):
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def _check_unit(unit, rect, n=33):
    x = np.linspace(-rect.T, rect.T, 4 * n)
    y = np.linspace(-rect.eta, rect.eta, n)
    grid = x[None, :] + 1j * y[:, None]
    vals = np.abs(np.asarray(unit(grid), dtype=complex))
    if not np.all(np.isfinite(vals)) or np.any(vals == 0.0) or np.max(vals) == 0.0:
        raise DegenerateUnit("unit vanishes or is not finite on the rectangle")


def _perimeter_points(rect, samples):
    c = rect.corners
    per = 4.0 * (rect.T + rect.eta)
    pts = []
    for i in range(4):
        a, b = c[i], c[(i + 1) % 4]
        n = max(2, int(round(samples * abs(b - a) / per)))
        pts.append(a + (b - a) * np.arange(n) / n)
    return np.concatenate(pts)


def _log_abs_minus_one(lm, ar):
    """``log|exp(lm + i ar) - 1|`` without overflow."""
    out = np.empty_like(lm)
    big = lm > 30.0
    out[big] = lm[big] + np.log(np.abs(1.0 - np.exp(-lm[big] - 1j * ar[big])))
    small = ~big
    with np.errstate(divide="ignore"):
        out[small] = np.log(np.abs(np.exp(lm[small] + 1j * ar[small]) - 1.0))
    return out


def separation_scan(rect, N, unit=bridge_unit, samples=256, map_fn=map):
    """Boundary sup of ``|X - U P_N|`` against boundary inf of ``|U P_N|``, ``X(w) = Xi(2w)``.

    The comparison runs over a uniform perimeter grid joined with the
    adaptively refined trace of the seam ratio.  Both windings (of ``X`` and of
    ``U P_N``) are computed; when the inequality holds they must agree.
    """
    if samples < 256:
        raise ValueError("samples must be >= 256")
    _check_unit(unit, rect)
    ref = log_product(unit_log(unit), pn_log(N))
    seam = log_quotient(xi2_log, ref)
    path = trace_boundary(seam, rect, map_fn=map_fn, relative=True)
    w = np.concatenate([_perimeter_points(rect, samples), path.w])
    lref, _ = ref(w)
    lseam, aseam = seam(w)
    ldiff = lref + _log_abs_minus_one(lseam, aseam)
    log_sup, log_inf = float(np.max(ldiff)), float(np.min(lref))
    wx = winding_number(trace_boundary(xi2_log, rect, map_fn=map_fn)).winding
    wr = winding_number(trace_boundary(ref, rect, map_fn=map_fn, relative=True)).winding
    holds = log_sup < log_inf
    with np.errstate(over="ignore"):
        sup_diff, inf_ref = float(np.exp(log_sup)), float(np.exp(log_inf))
    return SeparationReport(
        rect.T, rect.eta, int(N), sup_diff, inf_ref, bool(holds), log_sup, log_inf,
        int(w.size), wx, wr, bool((not holds) or wx == wr),
    )


def sector_scan_function(f, rect, theta, map_fn=map, relative=False):
    """Sector measurement for any log-form evaluator ``f``.

    The continuous argument starts from its principal value at ``T + 0i``.
    """
    if not 0 < theta < math.pi / 2:
        raise ValueError("theta must lie in (0, pi/2)")
    path = trace_boundary(f, rect, map_fn=map_fn, relative=relative)
    acc = np.abs(path.arg_accum)
    by_edge = {}
    for label, a in zip(path.edge, acc):
        by_edge[label] = max(by_edge.get(label, 0.0), float(a))
    tmax = float(np.max(acc))
    return SectorReport(rect.T, rect.eta, tmax, float(theta), bool(tmax <= theta), bool(path.indentations), by_edge)


def sector_scan(rect, N, unit=bridge_unit, theta=math.pi / 4, map_fn=map):
    """Maximal continuous ``|arg|`` of the seam ratio along the boundary of ``rect``."""
    _check_unit(unit, rect)
    return sector_scan_function(seam_log(N, unit), rect, theta, map_fn, relative=True)


def zero_divisor_compare(rect, N, include_origin=False, map_fn=map):
    """Winding of ``Xi(2w)`` on ``rect`` against the number of real zeros of ``P_N`` with ``|w| <= T``.

    The double zero of ``P_N`` at the origin is excluded unless
    ``include_origin``; its multiplicity is reported either way.
    """
    if N < 7:
        raise DomainError("zero comparison needs N >= 7 so that all zeros of P_N are real")
    wx = winding_number(trace_boundary(xi2_log, rect, map_fn=map_fn)).winding
    z = determinant_zeros(N)
    count = z.count_in(rect.T, include_origin=include_origin)
    origin = dict(zip(z.zeros, z.multiplicities)).get(0j, 0)
    return DivisorComparison(rect.T, rect.eta, int(N), wx, count, wx == count, not include_origin, origin)
