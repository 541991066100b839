"""Mellin and Laplace transforms of the theta kernels and the identities among them.

Three kinds of results live here:

* verified identities (Mellin transform of Theta versus Xi, the
  integration-by-parts identity for the completion operator, and the
  corrected half-density form for the centered kernel),
* diagnostic residuals of seam identities whose normalisation is not forced by
  the kernel definitions (left-boundary, bridge, overlap), and
* decay monitors (boundary terms, strip-uniform Riemann--Lebesgue defect).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import theta
from .errors import OutsideStrip
from .quadrature import QuadratureSpec, StripSpec, TransformResult, integrate, laplace_halfline
from .specfun import Xi, xi_completed
from .theta import DEFAULT_POLICY

__all__ = [
    "BilateralResult",
    "IdentityResidual",
    "BoundaryTerms",
    "RLEntry",
    "RLReport",
    "OverlapReport",
    "FORMAL_BILATERAL_STRIP",
    "FORMAL_LEFT_STRIP",
    "LB_DOMAIN",
    "mellin_halfline",
    "F_arch",
    "mellin_A_identity_sides",
    "mellin_A_identity_residual",
    "kstar_mellin_residual",
    "measure_strip",
    "bilateral_laplace",
    "B_LB",
    "boundary_formula",
    "lb_identity_residual",
    "bridge_unit",
    "bridge_residual",
    "boundary_term_monitor",
    "strip_RL_check",
    "overlap_diagnostic",
]

# Strips asserted for the bilateral transform and its left continuation;
# recorded next to the measured ones in reports.
FORMAL_BILATERAL_STRIP = StripSpec(-0.25, 0.75)
FORMAL_LEFT_STRIP = StripSpec(-0.5, 0.25)
# Both half-line pieces of B_LB converge iff -3/4 < Re s < 5/4.
LB_DOMAIN = StripSpec(-0.75, 1.25)

DEFAULT_MELLIN_SPEC = QuadratureSpec(variable_transform="log-substitution")
# finite-difference noise in the completion operator sits near 1e-12
DEFAULT_FD_SPEC = QuadratureSpec(target_tol=1e-10)


@dataclass(frozen=True)
class BilateralResult(TransformResult):
    strip: StripSpec = field(default=None)


@dataclass(frozen=True)
class IdentityResidual:
    """Both sides of an identity, their distance, and the quadrature error."""

    lhs: complex
    rhs: complex
    residual: float
    est_error: float
    converged: bool

    @property
    def relative(self):
        scale = abs(self.lhs)
        return self.residual / scale if scale > 0 else math.inf


@dataclass(frozen=True)
class BoundaryTerms:
    value_at_zero: float
    deriv_at_zero: float
    value_at_infinity: float
    deriv_at_infinity: float

    @property
    def at_zero(self):
        return max(self.value_at_zero, self.deriv_at_zero)

    @property
    def at_infinity(self):
        return max(self.value_at_infinity, self.deriv_at_infinity)


@dataclass(frozen=True)
class RLEntry:
    w: complex
    integral: complex
    defect: float
    defect_by_parts: float
    est_error: float
    converged: bool


@dataclass(frozen=True)
class RLReport:
    f0: float
    entries: tuple

    def defects(self):
        return [e.defect for e in self.entries]

    def by_imag(self):
        """Entries grouped by ``Im w``, each group ordered by ``|Re w|``."""
        groups = {}
        for e in self.entries:
            groups.setdefault(round(e.w.imag, 12), []).append(e)
        return {k: sorted(v, key=lambda e: abs(e.w.real)) for k, v in sorted(groups.items())}


@dataclass(frozen=True)
class OverlapReport:
    measured_bilateral: StripSpec
    lb_domain: StripSpec
    formal_bilateral: StripSpec
    formal_left: StripSpec
    overlap: StripSpec | None
    points: tuple
    residuals: tuple


def _power(t, s):
    return np.exp(complex(s) * np.log(t))


def mellin_halfline(f, s, spec=None):
    """``int_0^inf f(t) t^s dt/t`` for a vectorized kernel ``f``.

    Examples
    --------
    >>> abs(mellin_halfline(lambda t: np.exp(-t), 0.5).value - math.sqrt(math.pi)) < 1e-13
    True
    """
    spec = QuadratureSpec() if spec is None else spec
    s = complex(s)
    return integrate(lambda t: np.asarray(f(t)) * _power(t, s - 1.0), spec)


def F_arch(z, spec=None, pol=DEFAULT_POLICY):
    """Mellin transform of Theta along ``Re s = 3/4``: ``int Theta(t) t^{3/4 + iz} dt/t``."""
    spec = DEFAULT_MELLIN_SPEC if spec is None else spec
    return mellin_halfline(lambda t: theta.theta_completed(t, pol), 0.75 + 1j * complex(z), spec)


def mellin_A_identity_sides(f, s, spec=None, rel_step=1e-3):
    """Left side with the numerical completion operator, right side by plain Mellin.

    Left: ``int (A f)(t) t^s dt/t``.  Right: ``(s-1)(s-1/2) int f(t) t^{s-1/2} dt/t``.
    """
    spec = DEFAULT_FD_SPEC if spec is None else spec
    s = complex(s)
    lhs = mellin_halfline(lambda t: theta.arch_completion_apply(f, t, rel_step=rel_step), s, spec)
    rhs = mellin_halfline(f, s - 0.5, spec).scaled((s - 1.0) * (s - 0.5))
    return IdentityResidual(
        lhs.value,
        rhs.value,
        abs(lhs.value - rhs.value),
        lhs.est_error + rhs.est_error,
        lhs.converged and rhs.converged,
    )


def mellin_A_identity_residual(f, s, spec=None, rel_step=1e-3):
    """``|LHS - RHS|`` of the completion-operator integration-by-parts identity."""
    return mellin_A_identity_sides(f, s, spec, rel_step).residual


def kstar_mellin_residual(z, spec=None, pol=DEFAULT_POLICY):
    """Compare ``Xi(2z)`` with ``-(z^2 + 1/16) int K~*(t) t^{1/4 + iz} dt/t``.

    This is the integration-by-parts identity applied to ``K~*``, whose image
    under the completion operator is Theta.
    """
    spec = QuadratureSpec() if spec is None else spec
    z = complex(z)
    res = mellin_halfline(lambda t: theta.centered_kernels(t, pol).Ktilde_star, 0.25 + 1j * z, spec)
    c = -(z * z + 1.0 / 16.0)
    lhs = complex(Xi(2.0 * z))
    rhs = c * res.value
    return IdentityResidual(lhs, rhs, abs(lhs - rhs), abs(c) * res.est_error, res.converged)


def measure_strip(f, probes=(10.0, 20.0, 40.0)):
    """Open vertical strip where ``int_R f(x) e^{-sx} dx`` converges, from growth rates.

    The exponential rates of ``|f|`` at ``+inf`` and ``-inf`` are fitted from the
    two outermost probe points.  ``f`` identically zero on a side gives an
    infinite bound on that side.
    """
    p = np.asarray(sorted(probes), dtype=float)
    if p.size < 2:
        raise ValueError("need at least two probe points")

    def rate(sign):
        vals = np.abs(np.asarray(f(sign * p), dtype=complex))
        with np.errstate(divide="ignore"):
            logs = np.log(vals)
        if not np.isfinite(logs[-1]) or not np.isfinite(logs[-2]):
            return -math.inf
        return float((logs[-1] - logs[-2]) / (p[-1] - p[-2]))

    lo = rate(1.0)  # need Re s > growth rate at +inf
    hi = -rate(-1.0)
    if not lo < hi:
        raise OutsideStrip("empty convergence strip", strip=(lo, hi))
    return StripSpec(lo, hi)


def bilateral_laplace(f, s, spec=None, strip=None, margin=1e-6):
    """``int_R f(x) e^{-sx} dx`` inside the measured convergence strip.

    Raises
    ------
    OutsideStrip
        If ``Re s`` is not inside the (measured or supplied) strip; the strip
        is attached to the exception.
    """
    spec = QuadratureSpec() if spec is None else spec
    strip = measure_strip(f) if strip is None else strip
    s = complex(s)
    if not strip.contains(s, margin):
        raise OutsideStrip(f"Re s = {s.real} outside measured strip {strip.as_tuple()}", strip=strip.as_tuple())
    right = laplace_halfline(f, s, spec)
    left = laplace_halfline(lambda x: f(-x), -s, spec)
    tot = right + left
    return BilateralResult(tot.value, tot.est_error, tot.nodes_used, tot.converged, strip)


def _phi(pol):
    return lambda x: theta.phi_star(x, pol)


def _two_sided(sig1, sig2, spec, pol):
    # canonical order makes the sum independent of which argument came first
    a, b = sorted((complex(sig1), complex(sig2)), key=lambda c: (c.real, c.imag))
    f = _phi(pol)
    return laplace_halfline(f, a, spec) + laplace_halfline(f, b, spec)


def B_LB(s, spec=None, pol=DEFAULT_POLICY):
    """Left-strip continuation ``int_0^inf Phi*(x) (e^{-sx} + e^{-(1/2-s)x}) dx``.

    Raises
    ------
    OutsideStrip
        Unless ``-3/4 < Re s < 5/4``.
    """
    spec = QuadratureSpec() if spec is None else spec
    s = complex(s)
    if not LB_DOMAIN.contains(s):
        raise OutsideStrip(f"Re s = {s.real} outside {LB_DOMAIN.as_tuple()}", strip=LB_DOMAIN.as_tuple())
    return _two_sided(s, 0.5 - s, spec, pol)


def boundary_formula(z, spec=None, pol=DEFAULT_POLICY):
    """``int_0^inf Phi*(x) e^{(1/2-iz)x} dx + int_0^inf Phi*(x) e^{-(1-iz)x} dx`` for real ``z``."""
    spec = QuadratureSpec() if spec is None else spec
    z = float(z)
    return _two_sided(-0.5 + 1j * z, 1.0 - 1j * z, spec, pol)


def lb_identity_residual(z, spec=None, pol=DEFAULT_POLICY):
    """``Xi(2z)`` against ``2 pi (z^2 + 1/16) B_LB(-1/2 + iz)``; a diagnostic."""
    z = float(z)
    b = boundary_formula(z, spec, pol)
    c = 2.0 * math.pi * (z * z + 1.0 / 16.0)
    lhs = complex(Xi(2.0 * z))
    rhs = c * b.value
    return IdentityResidual(lhs, rhs, abs(lhs - rhs), c * b.est_error, b.converged)


def bridge_unit(w):
    """Quadratic unit ``pi (4 w^2 + 1) / 8``; vanishes only at ``w = +-i/2``."""
    w = np.asarray(w, dtype=complex)
    out = math.pi * (4.0 * w * w + 1.0) / 8.0
    return complex(out) if out.ndim == 0 else out


def bridge_residual(w, spec=None, pol=DEFAULT_POLICY, detail=False):
    """``|xi(1/2 - iw) - U(w) B_LB(-1/2 - iw/2)|`` on the strip ``|Im w| < 1/2``."""
    w = complex(w)
    if not abs(w.imag) < 0.5:
        raise OutsideStrip("bridge identity needs |Im w| < 1/2", strip=(-0.5, 0.5))
    b = B_LB(-0.5 - 0.5j * w, spec, pol)
    u = bridge_unit(w)
    lhs = complex(xi_completed(0.5 - 1j * w))
    rhs = u * b.value
    out = IdentityResidual(lhs, rhs, abs(lhs - rhs), abs(u) * b.est_error, b.converged)
    return out if detail else out.residual


def _numeric_derivative(f, t):
    h = 1e-5 * t
    return (np.asarray(f(t + h)) - np.asarray(f(t - h))) / (2 * h)


def boundary_term_monitor(f, s, epsilon, R, fprime=None):
    """Magnitudes ``|f(t) t^s|`` and ``|f'(t) t^{s+1}|`` at ``t = epsilon`` and ``t = R``.

    ``fprime`` defaults to a central difference.
    """
    if not 0 < epsilon < R:
        raise ValueError("need 0 < epsilon < R")
    s = complex(s)
    d = (lambda t: _numeric_derivative(f, t)) if fprime is None else fprime
    mags = []
    for t in (epsilon, R):
        tt = np.asarray(t, dtype=float)
        mags.append(abs(complex(np.asarray(f(tt))) * t**s))
        mags.append(abs(complex(np.asarray(d(tt))) * t ** (s + 1)))
    return BoundaryTerms(*(float(m) for m in mags))


def strip_RL_check(f, fprime, w_list, spec=None, eta_max=None):
    """Riemann--Lebesgue defect of ``I(w) = int_0^inf f(y) e^{-iwy} dy``.

    For each ``w`` the defect ``|iw I(w) - f(0)|`` is computed directly, and
    independently as ``|int_0^inf f'(y) e^{-iwy} dy|`` (one integration by
    parts).  Entries are ordered by ``|Re w|``.
    """
    spec = QuadratureSpec() if spec is None else spec
    f0 = float(np.real(np.asarray(f(np.asarray(0.0)))))
    entries = []
    for w in sorted((complex(v) for v in w_list), key=lambda c: (abs(c.real), c.imag)):
        if w == 0:
            raise ValueError("w = 0 has no oscillation")
        if eta_max is not None and not abs(w.imag) <= eta_max:
            raise OutsideStrip(f"|Im w| > {eta_max}", strip=(-eta_max, eta_max))
        r = laplace_halfline(f, 1j * w, spec)
        rp = laplace_halfline(fprime, 1j * w, spec)
        entries.append(
            RLEntry(
                w,
                r.value,
                abs(1j * w * r.value - f0),
                abs(rp.value),
                r.est_error,
                r.converged and rp.converged,
            )
        )
    return RLReport(f0, tuple(entries))


def overlap_diagnostic(spec=None, pol=DEFAULT_POLICY, points=None):
    """Compare ``B_LB`` with the bilateral transform of ``Phi*`` on their common strip.

    The bilateral strip is measured; evaluation points default to the midline
    of the overlap with the B_LB domain, at ``Im s in {0, 1}``.  Points outside
    the measured strip record ``nan`` rather than raising.
    """
    spec = QuadratureSpec() if spec is None else spec
    f = _phi(pol)
    strip = measure_strip(f)
    lo = max(strip.sigma_min, LB_DOMAIN.sigma_min)
    hi = min(strip.sigma_max, LB_DOMAIN.sigma_max)
    overlap = StripSpec(lo, hi) if lo < hi else None
    if points is None:
        points = () if overlap is None else (complex(overlap.midline), complex(overlap.midline, 1.0))
    residuals = []
    for s in points:
        try:
            bl = bilateral_laplace(f, s, spec, strip=strip)
            lb = B_LB(s, spec, pol)
            residuals.append(abs(bl.value - lb.value))
        except OutsideStrip:
            residuals.append(math.nan)
    return OverlapReport(
        strip, LB_DOMAIN, FORMAL_BILATERAL_STRIP, FORMAL_LEFT_STRIP, overlap,
        tuple(complex(p) for p in points), tuple(residuals),
    )
