"""Argument tracking around rectangles with indentation at boundary zeros.

Functions are supplied in *log form*: a vectorized callable returning
``(log|f(w)|, arg f(w))`` so that values far outside floating range (such as
the spectral determinant for large ``N``) can still be tracked.  Use
:func:`log_form` to wrap an ordinary complex function.

The closed path starts at the right-edge midpoint ``T + 0i`` and runs
counterclockwise.  A zero found on the boundary is bypassed by a clockwise arc
of radius ``indent_radius`` into the interior (a semicircle on an edge, a
quarter circle at a corner), so boundary zeros are excluded from the count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AmbiguousWinding, IndentationOverlap, NonRectifiable

__all__ = [
    "StripRectangle",
    "BoundaryPath",
    "WindingReport",
    "log_form",
    "log_product",
    "log_quotient",
    "trace_boundary",
    "winding_number",
]

TARGET_STEP = math.pi / 4
MAX_STEP = math.pi / 2


@dataclass(frozen=True)
class StripRectangle:
    """``{|Re w| <= T, |Im w| <= eta}``, boundary oriented counterclockwise."""

    T: float
    eta: float

    def __post_init__(self):
        if not (self.T > 0 and self.eta > 0):
            raise ValueError("T and eta must be positive")

    @property
    def corners(self):
        """Counterclockwise from the bottom-left vertex."""
        T, e = self.T, self.eta
        return (complex(-T, -e), complex(T, -e), complex(T, e), complex(-T, e))

    def contains(self, w):
        w = complex(w)
        return abs(w.real) < self.T and abs(w.imag) < self.eta


@dataclass(frozen=True)
class BoundaryPath:
    """Sampled closed path; the last sample repeats the first."""

    w: np.ndarray
    log_mag: np.ndarray
    arg: np.ndarray
    arg_accum: np.ndarray
    edge: tuple
    indentations: tuple
    refinements: int

    @property
    def f_value(self):
        with np.errstate(over="ignore"):
            return np.exp(self.log_mag + 1j * self.arg)

    @property
    def steps(self):
        return np.diff(self.arg_accum)

    @property
    def max_step(self):
        s = self.steps
        return float(np.max(np.abs(s))) if s.size else 0.0

    def __len__(self):
        return int(self.w.size)


@dataclass(frozen=True)
class WindingReport:
    winding: int
    total_arg_change: float
    max_step: float
    refinements: int


def log_form(f):
    """Wrap a complex vectorized ``f`` as a log-form evaluator."""

    def g(w):
        v = np.asarray(f(w), dtype=complex)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.angle(v)

    return g


def log_product(*evals):
    def g(w):
        mags, args = zip(*(e(w) for e in evals))
        return sum(mags), sum(args)

    return g


def log_quotient(num, den):
    def g(w):
        a, b = num(w)
        c, d = den(w)
        return a - c, b - d

    return g


def _wrap(x):
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def _evaluate(f, w):
    lm, ar = f(np.asarray(w, dtype=complex))
    return np.asarray(lm, dtype=float).reshape(-1), np.asarray(ar, dtype=float).reshape(-1)


def _edges(rect):
    c = rect.corners
    labels = ("bottom", "right", "top", "left")
    return [(c[i], c[(i + 1) % 4], labels[i]) for i in range(4)]


def _polish(f, a, b, best, lo, hi, iters=60):
    """Newton steps on the edge parameter, projected to the real line.

    Brent stops near sqrt(eps) in the parameter, which leaves a simple zero
    at ``|f| ~ 1e-9``; this sharpens it to rounding level.
    """
    fv, x = best
    for _ in range(iters):
        h = 1e-7 * (hi - lo)
        lm, ar = _evaluate(f, a + (b - a) * np.array([x - h, x, x + h]))
        if not np.isfinite(lm[1]):
            return (-np.inf, x)
        vals = np.exp(lm - lm[1] + 1j * ar)  # scaled by |f(x)|
        d = (vals[2] - vals[0]) / (2 * h)
        if d == 0:
            break
        xn = min(max(x - (vals[1] / d).real, lo), hi)
        vn = float(_evaluate(f, a + (b - a) * xn)[0][0])
        if not vn < fv:
            break
        fv, x = vn, xn
    return (fv, x)


def _find_boundary_zeros(f, rect, log_tol, density, relative=False):
    found = []
    for a, b, _ in _edges(rect):
        n = max(200, int(math.ceil(density * abs(b - a))))
        s = np.linspace(0.0, 1.0, n + 1)
        lm, _ = _evaluate(f, a + (b - a) * s)
        lm = np.where(np.isnan(lm), np.inf, lm)
        for i in range(n + 1):
            left = lm[i - 1] if i > 0 else np.inf
            right = lm[i + 1] if i < n else np.inf
            if not (lm[i] <= left and lm[i] <= right):
                continue
            if lm[i] == -np.inf:
                found.append(complex(a + (b - a) * s[i]))
                continue
            lo, hi = s[max(i - 1, 0)], s[min(i + 1, n)]

            def obj(x):
                return float(_evaluate(f, a + (b - a) * x)[0][0])

            res = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-15})
            best = min((res.fun, res.x), (lm[i], s[i]))
            best = _polish(f, a, b, best, lo, hi)
            # relative mode: a zero is a dip of depth |log zero_tol| below the neighbours
            level = min(left, right) if relative else 0.0
            if best[0] < log_tol + level:
                found.append(complex(a + (b - a) * best[1]))
    return found


def _merge_zeros(zeros, rect, radius):
    """Deduplicate, snap to corners, and check that detours are disjoint."""
    scale = max(rect.T, rect.eta)
    uniq = []
    for z in zeros:
        for c in rect.corners:
            if abs(z - c) < radius:
                z = c
        if all(abs(z - u) > 1e-9 * scale for u in uniq):
            uniq.append(z)
    for i, z in enumerate(uniq):
        for u in uniq[i + 1:]:
            if abs(z - u) < 2.0 * radius:
                raise IndentationOverlap(f"boundary zeros {z} and {u} closer than 2*indent_radius")
        if z not in rect.corners:
            for c in rect.corners:
                if abs(z - c) < 2.0 * radius:
                    raise IndentationOverlap(f"boundary zero {z} too close to corner {c}")
    return uniq


def _pieces(rect, zeros, r):
    """Ordered path pieces: ("line", a, b, label) or ("arc", center, th0, th1, label)."""
    corners = rect.corners
    corner_zero = [any(z == c for z in zeros) for c in corners]
    out = []
    for idx, (a, b, label) in enumerate(_edges(rect)):
        d = (b - a) / abs(b - a)
        on_edge = []
        for z in zeros:
            if z in corners:
                continue
            t = ((z - a) / d).real
            if abs(((z - a) / d).imag) < 1e-9 * abs(b - a) and 0 < t < abs(b - a):
                on_edge.append(t)
        start = a + r * d if corner_zero[idx] else a
        for t in sorted(on_edge):
            p = a + t * d
            out.append(("line", start, p - r * d, label))
            th = math.atan2(d.imag, d.real)
            out.append(("arc", p, th + math.pi, th, "arc"))
            start = p + r * d
        end = b - r * d if corner_zero[(idx + 1) % 4] else b
        out.append(("line", start, end, label))
        if corner_zero[(idx + 1) % 4]:
            th_in = math.atan2(d.imag, d.real)
            out.append(("arc", b, th_in + math.pi, th_in + math.pi / 2, "arc"))
    return out


def _adaptive(f, piece, n0, max_depth, log_tol, radius, centers=()):
    def point(s):
        if piece[0] == "line":
            _, a, b, _ = piece
            return a + (b - a) * s
        _, c, th0, th1, _ = piece
        return c + radius * np.exp(1j * (th0 + (th1 - th0) * s))

    s = np.linspace(0.0, 1.0, n0 + 1)
    lm, ar = _evaluate(f, point(s))
    added = 0
    for _ in range(max_depth):
        # near a detour |f| ~ radius**order is legitimately tiny
        pts = point(s)
        near = np.zeros(pts.shape, dtype=bool)
        for z in centers:
            near |= np.abs(pts - z) < 1.5 * radius
        if np.any(~(lm > -np.inf)) or np.any((lm <= log_tol) & ~near):
            raise NonRectifiable("path passes through a zero below zero_tol")
        bad = np.nonzero(np.abs(_wrap(np.diff(ar))) >= TARGET_STEP)[0]
        if bad.size == 0:
            return point(s), lm, ar, added
        mids = 0.5 * (s[bad] + s[bad + 1])
        mlm, mar = _evaluate(f, point(mids))
        added += mids.size
        s = np.insert(s, bad + 1, mids)
        lm = np.insert(lm, bad + 1, mlm)
        ar = np.insert(ar, bad + 1, mar)
    raise NonRectifiable("argument refinement exceeded the depth limit")


def trace_boundary(
    f, rect, zero_tol=1e-10, indent_radius=None, density=32.0, max_depth=40, map_fn=map, relative=False
):
    """Sample ``arg f`` continuously along the indented boundary of ``rect``.

    Parameters
    ----------
    f : callable
        Log-form evaluator ``w -> (log|f|, arg f)``.
    rect : StripRectangle
    zero_tol : float
        A boundary point with ``|f| < zero_tol`` is treated as a zero and indented.
    indent_radius : float, optional
        Radius of the detours; must be below ``min(T, eta)``.  Defaults to
        ``min(1e-3, min(T, eta) / 10)``.
    density : float
        Initial samples per unit length.
    map_fn : callable
        ``map``-like function used to process pieces (pass ``executor.map``
        to evaluate pieces concurrently).
    relative : bool
        Detect zeros as local dips of ``|f|`` by a factor ``zero_tol`` below
        the neighbouring samples instead of by absolute size; for functions
        whose magnitude varies over many orders along the boundary.

    Raises
    ------
    IndentationOverlap
        If detours would intersect each other or leave the rectangle.
    NonRectifiable
        If adaptive refinement fails to bring every step below pi/4.
    """
    r = min(1e-3, 0.1 * min(rect.T, rect.eta)) if indent_radius is None else float(indent_radius)
    if not 0 < r < min(rect.T, rect.eta):
        raise IndentationOverlap("indent_radius must be below min(T, eta)")
    zeros = _merge_zeros(_find_boundary_zeros(f, rect, math.log(zero_tol), density, relative), rect, r)
    pieces = _pieces(rect, zeros, r)
    log_tol = -np.inf if relative else math.log(zero_tol)

    def run(piece):
        length = abs(piece[2] - piece[1]) if piece[0] == "line" else r * abs(piece[3] - piece[2])
        n0 = max(8, 2 * int(math.ceil(0.5 * density * length)))
        return _adaptive(f, piece, n0, max_depth, log_tol, r, zeros)

    results = list(map_fn(run, pieces))
    ws, lms, ars, labels = [], [], [], []
    added = 0
    for k, (piece, (w, lm, ar, n)) in enumerate(zip(pieces, results)):
        sl = slice(0, None) if k == 0 else slice(1, None)  # shared endpoint
        ws.append(w[sl])
        lms.append(lm[sl])
        ars.append(ar[sl])
        labels.extend([piece[-1]] * w[sl].size)
        added += n
    w = np.concatenate(ws)
    lm = np.concatenate(lms)
    ar = np.concatenate(ars)
    # drop the duplicated closing point, rotate to start at T + 0i, re-close
    w, lm, ar, labels = w[:-1], lm[:-1], ar[:-1], labels[:-1]
    i0 = int(np.argmin(np.abs(w - rect.T)))
    order = np.r_[np.arange(i0, w.size), np.arange(0, i0), i0]
    w, lm, ar = w[order], lm[order], ar[order]
    labels = tuple(labels[i] for i in order)
    steps = _wrap(np.diff(ar))
    accum = np.concatenate(([ar[0]], ar[0] + np.cumsum(steps)))
    path = BoundaryPath(w, lm, ar, accum, labels, tuple((z, r) for z in zeros), added)
    if path.max_step >= MAX_STEP:
        raise NonRectifiable("argument step above pi/2 after refinement")
    return path


def winding_number(path, tol_fraction=0.01):
    """Winding number of the traced image about zero.

    Raises
    ------
    AmbiguousWinding
        If the total argument change is farther than ``tol_fraction * 2 pi``
        from a multiple of ``2 pi``.
    """
    total = float(path.arg_accum[-1] - path.arg_accum[0])
    k = int(round(total / (2.0 * math.pi)))
    if abs(total - 2.0 * math.pi * k) >= tol_fraction * 2.0 * math.pi:
        raise AmbiguousWinding(f"total argument change {total} not near a multiple of 2 pi")
    return WindingReport(k, total, path.max_step, path.refinements)
