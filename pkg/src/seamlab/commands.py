"""Command dispatch: each command is a fixed, ordered list of checks.

A check is a pure function of the configuration returning a
:class:`CheckResult`.  The runner times it, converts any
exception raised inside a check into a ``fail``
record carrying the exception name, and writes requested grids.  Record names
depend on the command only.
"""
from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import cycle, strip, theta, transforms
from .contour import StripRectangle, trace_boundary, winding_number
from .errors import OutsideStrip, SeamlabError
from .quadrature import QuadratureSpec
from .report import Record, ReportEnvelope, dumps, export_grid, to_jsonable
from .specfun import Xi, locate_real_zeros, xi_completed

__all__ = ["CheckResult", "CHECKS", "record_names", "run", "write_outputs"]


@dataclass
class CheckResult:
    inputs: dict
    values: object
    est_error: float | None
    outcome: str
    grids: list = field(default_factory=list)  # (name, axes, values)


def _spec(cfg, transform="double-exponential-halfline"):
    return QuadratureSpec(
        node_count=cfg["quadrature.node_count"],
        variable_transform=transform,
        target_tol=cfg["quadrature.target_tol"],
        refinement_limit=cfg["quadrature.refinement_limit"],
    )


def _pol(cfg):
    return theta.TruncationPolicy(cfg["truncation.tail_tol"], cfg["truncation.n_max"])


def _loggrid(spec3):
    lo, hi, n = spec3
    return np.geomspace(lo, hi, int(n))


def _passed(ok):
    return "pass" if ok else "fail"


def _sig(x, digits):
    return float(f"{x:.{digits - 1}e}")


def _fit_slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


# verify-identities


def _mellin_identification(cfg):
    spec, pol = _spec(cfg, "log-substitution"), _pol(cfg)
    rows, worst, err = [], 0.0, 0.0
    for z in cfg["verify.z_values"]:
        r = transforms.F_arch(z, spec, pol)
        ref = complex(Xi(2.0 * z))
        rel = abs(r.value - ref) / abs(ref)
        rows.append({"z": z, "F_arch": r.value, "Xi_2z": ref, "relative_error": rel, "converged": r.converged})
        worst, err = max(worst, rel), max(err, r.est_error / abs(ref))
    z0 = cfg["verify.zero_z"]
    r0 = transforms.F_arch(z0, spec, pol)
    ok = worst < cfg["verify.mellin_rel_tol"] and abs(r0.value) < cfg["verify.zero_abs_tol"]
    values = {"points": rows, "zero_z": z0, "F_arch_at_zero": r0.value, "max_relative_error": worst}
    inputs = {"z_values": cfg["verify.z_values"], "rel_tol": cfg["verify.mellin_rel_tol"],
              "zero_abs_tol": cfg["verify.zero_abs_tol"]}
    return CheckResult(inputs, values, max(err, r0.est_error), _passed(ok))


def _jacobi_inversion(cfg):
    pol, u = _pol(cfg), _loggrid(cfg["verify.u_grid"])
    lhs, b1 = theta.theta_jacobi(u, pol, method="direct", return_bound=True)
    rhs, b2 = theta.theta_jacobi(1.0 / u, pol, method="direct", return_bound=True)
    res = np.abs(lhs - rhs / np.sqrt(u))
    ok = float(res.max()) < cfg["verify.inversion_tol"]
    return CheckResult({"u_grid": cfg["verify.u_grid"]}, {"max_residual": float(res.max())},
                       float(np.max(b1 + b2 / np.sqrt(u))), _passed(ok))


def _self_dual_inversion(cfg):
    pol, t = _pol(cfg), _loggrid(cfg["verify.u_grid"])
    scale = theta.SelfDualScale()
    lhs, b1 = theta.trace_kernel_KL(t, scale, pol, method="direct", return_bound=True)
    rhs, b2 = theta.trace_kernel_KL(1.0 / t, scale, pol, method="direct", return_bound=True)
    res = np.abs(lhs - rhs / np.sqrt(t))
    ok = float(res.max()) < cfg["verify.inversion_tol"]
    return CheckResult({"t_grid": cfg["verify.u_grid"], "L": scale.L, "D": scale.D},
                       {"max_residual": float(res.max())}, float(np.max(b1 + b2 / np.sqrt(t))), _passed(ok))


def _theta_dual_representation(cfg):
    pol = _pol(cfg)
    t = np.geomspace(0.3, 3.0, 40)
    d, bd = theta.theta_completed(t, pol, method="direct", return_bound=True)
    i, bi = theta.theta_completed(t, pol, method="inverted", return_bound=True)
    res = float(np.max(np.abs(d - i)))
    return CheckResult({"t_range": [0.3, 3.0], "points": 40}, {"max_difference": res},
                       float(np.max(bd + bi)), _passed(res < cfg["verify.inversion_tol"]))


def _theta_rapid_decay(cfg):
    pol, A = _pol(cfg), 5.0
    small = np.geomspace(0.01, 1.0, 200)
    large = np.geomspace(1.0, 50.0, 200)
    ps = np.abs(theta.theta_completed(small, pol)) * small**-A
    pl = np.abs(theta.theta_completed(large, pol)) * large**A
    # bounded: finite, and the product dies off toward the open end of each grid
    ok = bool(np.all(np.isfinite(ps)) and np.all(np.isfinite(pl))
              and ps[0] < 1e-6 * ps.max() and pl[-1] < 1e-6 * pl.max())
    values = {"A": A, "max_small_t_product": float(ps.max()), "max_large_t_product": float(pl.max()),
              "product_at_0.01": float(ps[0]), "product_at_50": float(pl[-1])}
    return CheckResult({"A": A, "grids": [[0.01, 1.0], [1.0, 50.0]]}, values, pol.tail_tol, _passed(ok))


def _mellin_A_identity(cfg):
    spec = transforms.DEFAULT_FD_SPEC
    rows, worst, err = [], 0.0, 0.0
    for re, im in cfg["verify.mellin_A_points"]:
        r = transforms.mellin_A_identity_sides(lambda t: np.exp(-t - 1.0 / t), complex(re, im), spec)
        rows.append({"s": complex(re, im), "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual})
        worst, err = max(worst, r.residual), max(err, r.est_error)
    return CheckResult({"f": "exp(-t - 1/t)", "points": cfg["verify.mellin_A_points"]},
                       {"points": rows, "max_residual": worst}, err, _passed(worst < cfg["verify.identity_tol"]))


def _boundary_terms(cfg):
    pol = _pol(cfg)
    bt = transforms.boundary_term_monitor(lambda t: theta.theta_completed(t, pol), 0.75, 1e-3, 50.0,
                                          fprime=lambda t: theta.theta_completed_derivative(t, pol))
    worst = max(bt.at_zero, bt.at_infinity)
    return CheckResult({"f": "Theta", "s": 0.75, "epsilon": 1e-3, "R": 50.0}, bt, pol.tail_tol,
                       _passed(worst < cfg["verify.boundary_tol"]))


def _kernel_functional_equation(cfg):
    # K~*(1/t) = t^{1/2} K~*(t), both sides from the direct Jacobi series
    pol = _pol(cfg)
    t = np.geomspace(0.3, 3.0, 40)

    def kstar(v):
        return theta.theta_jacobi(v, pol, method="direct") - 1.0 - v**-0.5

    res = float(np.max(np.abs(kstar(1.0 / t) - np.sqrt(t) * kstar(t))))
    return CheckResult({"t_range": [0.3, 3.0], "points": 40}, {"max_residual": res}, pol.tail_tol,
                       _passed(res < cfg["verify.inversion_tol"]))


def _kstar_mellin_identity(cfg):
    spec, pol = _spec(cfg, "log-substitution"), _pol(cfg)
    rows, worst, err = [], 0.0, 0.0
    for z in cfg["verify.z_values"]:
        r = transforms.kstar_mellin_residual(z, spec, pol)
        rows.append({"z": z, "lhs": r.lhs, "rhs": r.rhs, "relative": r.relative})
        worst, err = max(worst, r.relative), max(err, r.est_error / abs(r.lhs))
    return CheckResult({"z_values": cfg["verify.z_values"]}, {"points": rows, "max_relative": worst}, err,
                       _passed(worst < cfg["verify.mellin_rel_tol"]))


def _xi_symmetry(cfg):
    w = np.array([0.3 + 2.0j, -1.5 + 0.7j, 2.5 - 4.0j, 0.5 + 14.0j, -3.2 + 0.1j])
    a, b = xi_completed(w), xi_completed(1.0 - w)
    sym = float(np.max(np.abs(a - b) / np.abs(a)))
    z = np.linspace(0.0, 20.0, 41)
    imag = float(np.max(np.abs(Xi(z).imag) / np.maximum(np.abs(Xi(z)), 1e-300)))
    ok = sym < 1e-10 and imag < 1e-10
    return CheckResult({"points": w, "real_axis": [0.0, 20.0]},
                       {"reflection_relative": sym, "imag_over_abs_on_real_axis": imag}, 1e-15 * len(w),
                       _passed(ok))


def _poisson(model, t):
    j = np.arange(-(model.N // 2), model.N // 2 + 1)
    fs = np.array([cycle.fourier_gaussian_sum(model, t, int(k)) for k in j])
    wg = np.array([cycle.wrapped_gaussian(model, t, int(k)) for k in j])
    return float(np.max(np.abs(fs - wg)))


def _poisson_summation(cfg):
    t = cfg["ulclt.t"]
    res = {N: _poisson(cycle.CycleModel(N), t) for N in cfg["ulclt.N_values"]}
    worst = max(res.values())
    return CheckResult({"N_values": cfg["ulclt.N_values"], "t": t}, {"max_difference": res}, 1e-17,
                       _passed(worst < cfg["ulclt.poisson_tol"]))


def _determinant_zeros_real(cfg):
    rows, ok = {}, True
    for N in cfg["zeros.N_values"]:
        dz = cycle.determinant_zeros(N)
        rows[N] = {"max_imag": dz.max_imag, "max_factor_residual": dz.max_factor_residual,
                   "zeros_counted": int(sum(dz.multiplicities))}
        if N >= 7:
            ok = ok and dz.max_imag < 1e-10
    err = max(r["max_factor_residual"] for r in rows.values())
    return CheckResult({"N_values": cfg["zeros.N_values"], "realness_from_N": 7}, rows, err, _passed(ok))


def _q_tilde_rate(cfg):
    Ns = [16, 32, 64, 128]
    r = np.linspace(0.0, 2.0, 21)
    th = np.linspace(0.0, 2.0 * math.pi, 48, endpoint=False)
    w = (r[:, None] * np.exp(1j * th[None, :])).ravel()
    sup = [float(np.max(np.abs(cycle.q_tilde(N, w) - w * w))) for N in Ns]
    slope = _fit_slope(Ns, sup)
    return CheckResult({"N_values": Ns, "disc_radius": 2.0}, {"sup_errors": sup, "slope": slope}, 0.0,
                       _passed(abs(slope + 2.0) <= 0.4))


def _winding_xi(cfg):
    eta, rows, ok, err = 0.2, [], True, 0.0
    for T in (3.0, 8.0):
        rect = StripRectangle(T, eta)
        wr = winding_number(trace_boundary(strip.xi2_log, rect))
        # zeros of Xi(2w) inside the rectangle sit at w = +-gamma/2
        expected = 2 * len(locate_real_zeros(2.0 * T))
        rows.append({"T": T, "winding": wr.winding, "expected": expected, "max_step": wr.max_step})
        ok = ok and wr.winding == expected
        err = max(err, abs(wr.total_arg_change - 2.0 * math.pi * wr.winding))
    return CheckResult({"T_values": [3.0, 8.0], "eta": eta}, rows, err, _passed(ok))


def _strip_riemann_lebesgue(cfg):
    pol = _pol(cfg)
    ws = [s * re + 1j * im for re in cfg["seam.rl_re"] for im in cfg["seam.rl_im"] for s in (1.0, -1.0)]
    rep = transforms.strip_RL_check(lambda y: theta.f_theta(y, pol), lambda y: theta.f_theta_derivative(y, pol),
                                    ws, _spec(cfg))
    ok, rows = True, []
    for e in rep.entries:
        rows.append({"w": e.w, "defect": e.defect, "defect_by_parts": e.defect_by_parts})
    lo, hi = min(cfg["seam.rl_re"]), max(cfg["seam.rl_re"])
    for im in cfg["seam.rl_im"]:
        for s in (1.0, -1.0):
            d = {round(abs(e.w.real), 9): e.defect for e in rep.entries
                 if abs(e.w.imag - im) < 1e-12 and math.copysign(1.0, e.w.real) == s}
            ok = ok and d[round(hi, 9)] < d[round(lo, 9)]
    err = max(e.est_error for e in rep.entries) * max(abs(w) for w in ws)
    return CheckResult({"re": cfg["seam.rl_re"], "im": cfg["seam.rl_im"]}, {"f0": rep.f0, "entries": rows},
                       err, _passed(ok and all(e.converged for e in rep.entries)))


# kernel-table


def _theta_table(cfg):
    pol, t = _pol(cfg), _loggrid(cfg["kernel.t_grid"])
    v, b = theta.theta_completed(t, pol, return_bound=True)
    kl = theta.trace_kernel_KL(t, pol=pol)
    grid = ("theta_kernel", [("t", t)], {"Theta": v, "K_L": kl})
    ok = bool(np.all(np.isfinite(v)) and np.all(np.isfinite(kl)))
    return CheckResult({"t_grid": cfg["kernel.t_grid"]}, {"points": int(t.size)}, float(b.max()), _passed(ok), [grid])


def _centered_kernel_table(cfg):
    pol, t = _pol(cfg), _loggrid(cfg["kernel.t_grid"])
    ck = theta.centered_kernels(t, pol)
    grid = ("centered_kernels", [("t", t)], {"Ktilde": ck.Ktilde, "Ktilde_star": ck.Ktilde_star,
                                              "Ktilde_sym": ck.Ktilde_sym, "Ktilde_star_sym": ck.Ktilde_star_sym})
    ok = all(np.all(np.isfinite(a)) for a in (ck.Ktilde, ck.Ktilde_star))
    return CheckResult({"t_grid": cfg["kernel.t_grid"]}, {"points": int(t.size)}, pol.tail_tol, _passed(ok), [grid])


def _phi_star_table(cfg):
    pol = _pol(cfg)
    lo, hi, n = cfg["kernel.x_grid"]
    x = np.linspace(lo, hi, int(n))
    v, b = theta.phi_star(x, pol, return_bound=True)
    grid = ("phi_star", [("x", x)], {"phi_star": v})
    return CheckResult({"x_grid": cfg["kernel.x_grid"]}, {"points": int(x.size)}, float(b.max()),
                       _passed(bool(np.all(np.isfinite(v)))), [grid])


def _gaussian_sum_bounds(cfg):
    pol, t = _pol(cfg), _loggrid(cfg["kernel.t_grid"])
    alphas = cfg["kernel.alpha_values"]
    reps = [theta.gaussian_sum_bound_check(a, t, pol) for a in alphas]
    vals = np.array([r.sums for r in reps])
    grid = ("gaussian_sums", [("alpha", [float(a) for a in alphas]), ("t", t)], {"sum": vals})
    rows = {a: {"small_t_constant": r.small_t_constant, "large_t_constant": r.large_t_constant}
            for a, r in zip(alphas, reps)}
    ok = all(math.isfinite(c) for r in reps for c in (r.small_t_constant, r.large_t_constant)
             if not math.isnan(c))
    return CheckResult({"alpha_values": alphas, "t_grid": cfg["kernel.t_grid"]}, rows, pol.tail_tol,
                       _passed(ok), [grid])


# ulclt


def _ulclt_sup_error(cfg):
    t = cfg["ulclt.t"]
    reps = [cycle.ulclt_report(cycle.CycleModel(N), t, tuple(cfg["ulclt.window"])) for N in cfg["ulclt.N_values"]]
    rows = {r.N: {"sup_error": r.sup_error, "sup_error_times_N": r.sup_error * r.N, "j_at_sup": r.j_at_sup}
            for r in reps}
    return CheckResult({"N_values": cfg["ulclt.N_values"], "t": t}, rows, 1e-16, "diagnostic")


def _ulclt_rate(cfg):
    t = cfg["ulclt.t"]
    scaled = [cycle.ulclt_report(cycle.CycleModel(N), t).sup_error * N for N in cfg["ulclt.N_values"]]
    spread = max(scaled) / min(scaled)
    return CheckResult({"N_values": cfg["ulclt.N_values"], "t": t, "spread_max": cfg["ulclt.spread_max"]},
                       {"sup_error_times_N": scaled, "spread": spread}, 1e-16,
                       _passed(spread <= cfg["ulclt.spread_max"]))


def _ulclt_window(cfg):
    # sup error over the time window for the smallest and largest N
    lo, hi = cfg["ulclt.window"]
    ts = np.linspace(lo, hi, 7)
    rows = {}
    for N in (min(cfg["ulclt.N_values"]), max(cfg["ulclt.N_values"])):
        rows[N] = [cycle.ulclt_report(cycle.CycleModel(N), float(t)).sup_error for t in ts]
    grid = ("ulclt_window", [("N", [float(N) for N in rows]), ("t", ts)], {"sup_error": np.array(list(rows.values()))})
    return CheckResult({"window": cfg["ulclt.window"]}, {"t": ts, "sup_error": rows}, 1e-16, "diagnostic", [grid])


def _scaling_residuals(cfg):
    pol, t = _pol(cfg), cfg["ulclt.t"]
    return [cycle.scaling_limit_residual(N, t, pol=pol) for N in cfg["ulclt.trace_N"]]


def _scaling_trace_monotone(cfg):
    res = _scaling_residuals(cfg)
    ok = all(b < a for a, b in zip(res, res[1:]))
    return CheckResult({"N_values": cfg["ulclt.trace_N"], "t": cfg["ulclt.t"]}, {"residuals": res},
                       _pol(cfg).tail_tol, _passed(ok))


def _scaling_trace_rate(cfg):
    res = _scaling_residuals(cfg)
    slope = _fit_slope(cfg["ulclt.trace_N"], res)
    lo, hi = cfg["ulclt.rate_range"]
    return CheckResult({"N_values": cfg["ulclt.trace_N"], "t": cfg["ulclt.t"], "rate_range": [lo, hi]},
                       {"residuals": res, "rate": slope}, _pol(cfg).tail_tol, _passed(lo <= slope <= hi))


# zeros


def _xi_real_zeros(cfg):
    zl = locate_real_zeros(cfg["zeros.z_max"], cfg["zeros.tol"])
    z = np.asarray(zl.ordinates)
    h = cfg["zeros.tol"]
    ok = bool(z.size) and all(Xi(v - h).real * Xi(v + h).real <= 0 for v in z)
    grid = ("zeros", [("index", [float(i) for i in range(1, z.size + 1)])], {"ordinate": z})
    return CheckResult({"z_max": cfg["zeros.z_max"], "tol": h}, {"zeros": z, "count": int(z.size)}, h,
                       _passed(ok), [grid])


def _pn_zero_tables(cfg):
    grids, rows = [], {}
    for N in cfg["zeros.N_values"]:
        dz = cycle.determinant_zeros(N)
        z = np.asarray(dz.zeros)
        grids.append((f"pn_zeros_N{N}", [("index", [float(i) for i in range(1, z.size + 1)])],
                      {"w": z, "multiplicity": np.asarray(dz.multiplicities, dtype=float)}))
        rows[N] = {"distinct": int(z.size), "with_multiplicity": int(sum(dz.multiplicities))}
    return CheckResult({"N_values": cfg["zeros.N_values"]}, rows, 0.0, "diagnostic", grids)


# scan-rectangle


def _unit(cfg):
    if cfg["scan.unit"] == "one":
        return lambda w: np.ones_like(np.asarray(w, dtype=complex))
    return transforms.bridge_unit


def _pairs(cfg):
    Ts = cfg["scan.T"]
    if cfg["scan.N"]:
        if len(cfg["scan.N"]) != len(Ts):
            raise SeamlabError("scan.N must have one entry per scan.T value")
        return list(zip(Ts, cfg["scan.N"]))
    sched = strip.Schedule(cfg["scan.schedule"])
    return [(T, sched(T)) for T in Ts]


def _separation(cfg):
    rows = []
    for T, N in _pairs(cfg):
        rows.append(strip.separation_scan(StripRectangle(T, cfg["scan.eta"]), N, _unit(cfg), cfg["scan.samples"]))
    return CheckResult({"pairs": _pairs(cfg), "eta": cfg["scan.eta"], "unit": cfg["scan.unit"]}, rows, None,
                       "diagnostic")


def _sector(cfg):
    rows, grids = [], []
    unit = _unit(cfg)
    for T, N in _pairs(cfg):
        rect = StripRectangle(T, cfg["scan.eta"])
        rows.append(strip.sector_scan(rect, N, unit, cfg["scan.theta"]))
        if cfg["scan.export_trace"]:
            p = trace_boundary(strip.seam_log(N, unit), rect, relative=True)
            grids.append((f"seam_trace_T{T:g}_N{N}", [("index", [float(i) for i in range(len(p))])],
                          {"re_w": p.w.real, "im_w": p.w.imag, "log_abs_R": p.log_mag, "arg_R": p.arg_accum}))
    return CheckResult({"pairs": _pairs(cfg), "eta": cfg["scan.eta"], "theta": cfg["scan.theta"]}, rows, None,
                       "diagnostic", grids)


def _divisor(cfg):
    rows = [strip.zero_divisor_compare(StripRectangle(T, cfg["scan.eta"]), N) for T, N in _pairs(cfg)]
    return CheckResult({"pairs": _pairs(cfg), "eta": cfg["scan.eta"], "include_origin": False}, rows, None,
                       "diagnostic")


# seam-report


def _variants(cfg, transform):
    spec, pol = _spec(cfg, transform), _pol(cfg)
    return {"base": (spec, pol), "nodes_doubled": (spec.doubled(), pol), "tail_tightened": (spec, pol.tightened())}


def _lb_identity(cfg):
    spec, pol = _spec(cfg), _pol(cfg)
    rows = [transforms.lb_identity_residual(z, spec, pol) for z in cfg["seam.z_values"]]
    return CheckResult({"z_values": cfg["seam.z_values"]}, [dict(z=z, **to_jsonable(r)) for z, r in
                                                          zip(cfg["seam.z_values"], rows)],
                       max(r.est_error for r in rows), "diagnostic")


def _lb_identity_stability(cfg):
    d = cfg["seam.sig_digits"]
    table = {}
    for name, (spec, pol) in _variants(cfg, "double-exponential-halfline").items():
        table[name] = [transforms.lb_identity_residual(z, spec, pol).residual for z in cfg["seam.z_values"]]
    rounded = {k: [_sig(v, d) for v in vals] for k, vals in table.items()}
    ok = len({tuple(v) for v in rounded.values()}) == 1
    spread = max(abs(a - b) for vals in zip(*table.values()) for a in vals for b in vals)
    return CheckResult({"z_values": cfg["seam.z_values"], "sig_digits": d}, {"residuals": table,
                                                                           "rounded": rounded}, spread,
                       _passed(ok))


def _bridge(cfg):
    spec, pol = _spec(cfg), _pol(cfg)
    rows = []
    for re, im in cfg["seam.bridge_points"]:
        r = transforms.bridge_residual(complex(re, im), spec, pol, detail=True)
        rows.append({"w": complex(re, im), "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual})
    return CheckResult({"points": cfg["seam.bridge_points"]}, rows, None, "diagnostic")


def _twist_fit(pol, x):
    x = np.asarray(x, dtype=float)
    beta = theta.twist_exponent(x, pol)
    logratio = beta * x
    slope, intercept = np.polyfit(x, logratio, 1)
    return float(slope), float(intercept), beta


def _twist_exponent(cfg):
    slope, intercept, beta = _twist_fit(_pol(cfg), cfg["seam.twist_x"])
    return CheckResult({"x": cfg["seam.twist_x"]}, {"beta_hat": beta, "fit_slope": slope,
                                                     "fit_intercept": intercept}, None, "diagnostic")


def _twist_constancy(cfg):
    _, _, beta = _twist_fit(_pol(cfg), cfg["seam.twist_x"])
    spread = float(np.max(beta) - np.min(beta))
    return CheckResult({"x": cfg["seam.twist_x"], "tol": cfg["seam.twist_tol"]}, {"spread": spread,
                                                                                 "beta_hat": beta},
                       spread, _passed(spread <= cfg["seam.twist_tol"]))


def _twist_stability(cfg):
    # the exponent involves no quadrature, so the node-doubled variant repeats the base one
    d = cfg["seam.sig_digits"]
    fits = {k: _twist_fit(pol, cfg["seam.twist_x"])[0] for k, (_, pol) in _variants(cfg, "log-substitution").items()}
    rounded = {k: _sig(v, d) for k, v in fits.items()}
    ok = len(set(rounded.values())) == 1
    return CheckResult({"x": cfg["seam.twist_x"], "sig_digits": d}, {"fit_slope": fits, "rounded": rounded},
                       max(fits.values()) - min(fits.values()), _passed(ok))


def _twist_formal(cfg):
    pol, b = _pol(cfg), cfg["seam.twist_beta_formal"]
    x = np.asarray(cfg["seam.twist_x"], dtype=float)
    res = np.abs(theta.twist_residual(x, b, pol))
    rel = res / np.abs(theta.phi_star(-x, pol))
    return CheckResult({"beta": b, "x": cfg["seam.twist_x"]}, {"residual": res, "relative": rel}, None,
                       "diagnostic")


def _overlap(cfg):
    rep = transforms.overlap_diagnostic(_spec(cfg), _pol(cfg))
    try:
        transforms.bilateral_laplace(lambda x: theta.phi_star(x, _pol(cfg)), 0.0, _spec(cfg))
        at_zero = "computed"
    except OutsideStrip as e:
        at_zero = f"OutsideStrip {e.strip}"
    return CheckResult({}, {"report": rep, "bilateral_at_s0": at_zero}, None, "diagnostic")


def _bilateral_strip(cfg):
    pol = _pol(cfg)
    measured = transforms.measure_strip(lambda x: theta.phi_star(x, pol))
    formal = transforms.FORMAL_BILATERAL_STRIP
    return CheckResult({"probes": [10.0, 20.0, 40.0]},
                       {"measured": measured.as_tuple(), "formal": formal.as_tuple()}, None, "diagnostic")


CHECKS = {
    "verify-identities": [
        ("mellin_identification", _mellin_identification),
        ("jacobi_inversion", _jacobi_inversion),
        ("self_dual_inversion", _self_dual_inversion),
        ("theta_dual_representation", _theta_dual_representation),
        ("theta_rapid_decay", _theta_rapid_decay),
        ("mellin_A_identity", _mellin_A_identity),
        ("boundary_terms", _boundary_terms),
        ("kernel_functional_equation", _kernel_functional_equation),
        ("kstar_mellin_identity", _kstar_mellin_identity),
        ("xi_symmetry", _xi_symmetry),
        ("poisson_summation", _poisson_summation),
        ("determinant_zeros_real", _determinant_zeros_real),
        ("q_tilde_rate", _q_tilde_rate),
        ("winding_xi", _winding_xi),
        ("strip_riemann_lebesgue", _strip_riemann_lebesgue),
    ],
    "kernel-table": [
        ("theta_table", _theta_table),
        ("centered_kernel_table", _centered_kernel_table),
        ("phi_star_table", _phi_star_table),
        ("gaussian_sum_bounds", _gaussian_sum_bounds),
    ],
    "ulclt": [
        ("ulclt_sup_error", _ulclt_sup_error),
        ("ulclt_rate", _ulclt_rate),
        ("poisson_summation", _poisson_summation),
        ("ulclt_window", _ulclt_window),
        ("scaling_trace_monotone", _scaling_trace_monotone),
        ("scaling_trace_rate", _scaling_trace_rate),
    ],
    "zeros": [
        ("xi_real_zeros", _xi_real_zeros),
        ("determinant_zeros_real", _determinant_zeros_real),
        ("pn_zero_tables", _pn_zero_tables),
    ],
    "scan-rectangle": [
        ("separation_scan", _separation),
        ("sector_scan", _sector),
        ("zero_divisor_compare", _divisor),
    ],
    "seam-report": [
        ("lb_identity", _lb_identity),
        ("lb_identity_stability", _lb_identity_stability),
        ("bridge_identity", _bridge),
        ("twist_exponent", _twist_exponent),
        ("twist_constancy", _twist_constancy),
        ("twist_stability", _twist_stability),
        ("twist_formal_exponent", _twist_formal),
        ("overlap", _overlap),
        ("bilateral_strip", _bilateral_strip),
    ],
}


def record_names(command):
    return [name for name, _ in CHECKS[command]]


def _execute(name, fn, cfg):
    t0 = time.perf_counter()
    try:
        res = fn(cfg)
        error = None
    except Exception as e:  # recorded, never fatal to the run
        res = CheckResult({}, None, None, "fail")
        error = f"{type(e).__name__}: {e}"
    wall = time.perf_counter() - t0
    rec = Record(name, to_jsonable(res.inputs), to_jsonable(res.values), res.est_error, res.outcome, wall, error)
    if rec.est_error is not None:
        rec.est_error = float(rec.est_error) if math.isfinite(rec.est_error) else None
    return rec, res.grids


def run(cfg, out_dir=None, threads=None):
    """Run every check of ``cfg.command`` and assemble the report.

    Parameters
    ----------
    cfg : RunConfig
    out_dir : str, optional
        Where grid CSVs go; with ``None`` grids are listed but not written.
    threads : int, optional
        Worker threads for independent checks (default ``cfg['threads']``).
        Results are merged in the fixed check order.

    Returns
    -------
    ReportEnvelope
    """
    checks = CHECKS[cfg.command]
    threads = cfg["threads"] if threads is None else int(threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _execute(c[0], c[1], cfg), checks))
    else:
        results = [_execute(name, fn, cfg) for name, fn in checks]
    env = ReportEnvelope(__version__, cfg.command, to_jsonable(cfg.echo()), deterministic=cfg["deterministic"])
    for rec, grids in results:
        for gname, axes, values in grids:
            if out_dir is not None:
                try:
                    export_grid(gname, axes, values, out_dir)
                except OSError as e:
                    rec.outcome, rec.error = "fail", f"IoError: {e}"
            env.exports.append(f"{gname}.csv")
        env.records.append(rec)
    return env


def write_outputs(env, out_dir):
    """Write ``report.json`` and ``timings.json`` into ``out_dir``; return the report path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "report.json")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(env))
    with open(os.path.join(out_dir, "timings.json"), "w", encoding="utf-8") as fh:
        json.dump(to_jsonable(env.timings()), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path
