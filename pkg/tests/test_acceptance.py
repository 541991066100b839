"""The ten acceptance criteria, one test each.

Every test records a one-line outcome (printed in the terminal summary and
to stdout) before asserting, so failures are reported alongside passes.
"""
import json
import math
import time

import jsonschema
import numpy as np
import pytest

from seamlab import theta, transforms
from seamlab.commands import CHECKS, run
from seamlab.config import load_config
from seamlab.contour import StripRectangle, log_form, trace_boundary, winding_number
from seamlab.cycle import CycleModel, determinant_zeros, fourier_gaussian_sum, q_tilde, scaling_limit_residual, \
    ulclt_report, wrapped_gaussian
from seamlab.quadrature import QuadratureSpec
from seamlab.report import dumps, load_schema
from seamlab.specfun import Xi, locate_real_zeros

from conftest import ACCEPTANCE


def _record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


def _check(command, name, **overrides):
    cfg = load_config(text="", command=command,
                      overrides=[f"{k.replace('__', '.')}={json.dumps(v)}" for k, v in overrides.items()])
    return dict(CHECKS[command])[name](cfg)


def test_criterion_01_mellin_identification():
    t0 = time.perf_counter()
    spec = QuadratureSpec(variable_transform="log-substitution")
    pol = theta.TruncationPolicy()
    rel = max(abs(transforms.F_arch(z, spec, pol).value - Xi(2 * z)) / abs(Xi(2 * z)) for z in (0, 0.5, 1, 2, 5))
    at_zero = abs(transforms.F_arch(7.0673627, spec, pol).value)
    dt = time.perf_counter() - t0
    _record(1, rel < 1e-8 and at_zero < 1e-6 and dt < 30,
            f"max rel err {rel:.2e}, |F_arch(7.0673627)| = {at_zero:.2e}, {dt:.1f} s")


def test_criterion_02_jacobi_and_self_dual_inversion():
    pol = theta.TruncationPolicy()
    u = np.geomspace(0.05, 20, 40)
    jac = np.max(np.abs(theta.theta_jacobi(u, pol, method="direct")
                        - theta.theta_jacobi(1 / u, pol, method="direct") / np.sqrt(u)))
    sc = theta.SelfDualScale()
    sd = np.max(np.abs(theta.trace_kernel_KL(u, sc, pol, method="direct")
                       - theta.trace_kernel_KL(1 / u, sc, pol, method="direct") / np.sqrt(u)))
    _record(2, jac < 1e-12 and sd < 1e-12, f"Jacobi residual {jac:.2e}, self-dual residual {sd:.2e}")


def test_criterion_03_theta_dual_and_decay():
    r1 = _check("verify-identities", "theta_dual_representation")
    r2 = _check("verify-identities", "theta_rapid_decay")
    ok = r1.outcome == "pass" and r2.outcome == "pass"
    _record(3, ok, f"dual difference {r1.values['max_difference']:.2e}, decay products "
                   f"{r2.values['max_small_t_product']:.3g} / {r2.values['max_large_t_product']:.3g} (A = 5)")


def test_criterion_04_mellin_A_and_boundary_terms():
    spec = transforms.DEFAULT_FD_SPEC
    res = max(transforms.mellin_A_identity_sides(lambda t: np.exp(-t - 1 / t), s, spec).residual
              for s in (0.75, 0.75 + 1j, 2.0))
    pol = theta.TruncationPolicy()
    bt = transforms.boundary_term_monitor(lambda t: theta.theta_completed(t, pol), 0.75, 1e-3, 50.0,
                                          fprime=lambda t: theta.theta_completed_derivative(t, pol))
    worst = max(bt.at_zero, bt.at_infinity)
    _record(4, res < 1e-8 and worst < 1e-12, f"identity residual {res:.2e}, boundary terms {worst:.2e}")


def test_criterion_05_ulclt():
    t0 = time.perf_counter()
    Ns = (32, 64, 128, 256)
    scaled = [ulclt_report(CycleModel(N), 1.0).sup_error * N for N in Ns]
    spread = max(scaled) / min(scaled)
    poisson = 0.0
    for N in Ns:
        m = CycleModel(N)
        poisson = max(poisson, max(abs(fourier_gaussian_sum(m, 1.0, j) - wrapped_gaussian(m, 1.0, j))
                                   for j in range(-N // 2, N // 2 + 1)))
    dt = time.perf_counter() - t0
    _record(5, spread <= 3 and poisson < 1e-13 and dt < 10,
            f"sup_error*N = {[round(v, 4) for v in scaled]} (spread {spread:.2f}), poisson {poisson:.1e}, "
            f"{dt:.1f} s")


def test_criterion_06_scaling_trace():
    Ns = (64, 128, 256)
    res = [scaling_limit_residual(N, 1.0) for N in Ns]
    mono = all(b < a for a, b in zip(res, res[1:]))
    rate = float(np.polyfit(np.log(Ns), np.log(res), 1)[0])
    _record(6, mono and -1.5 <= rate <= -0.5,
            f"residuals {[f'{r:.3e}' for r in res]}, monotone {mono}, rate {rate:.4f}")


def test_criterion_07_spectral_family():
    mi = max(determinant_zeros(N).max_imag for N in (7, 8, 16, 32, 64))
    Ns = [16, 32, 64, 128]
    w = (np.linspace(0, 2, 21)[:, None] * np.exp(1j * np.linspace(0, 2 * math.pi, 48, endpoint=False))).ravel()
    sup = [np.max(np.abs(q_tilde(N, w) - w * w)) for N in Ns]
    slope = float(np.polyfit(np.log(Ns), np.log(sup), 1)[0])
    _record(7, mi < 1e-10 and abs(slope + 2) <= 0.4, f"max imag {mi:.1e}, q_tilde slope {slope:.4f}")


def _poly(roots):
    def f(w):
        w = np.asarray(w, dtype=complex)
        out = np.ones_like(w)
        for a in roots:
            out = out * (w - a)
        return out

    return f


def test_criterion_08_contour_engine():
    rng = np.random.default_rng(20240601)
    exact = 0
    for _ in range(50):
        rect = StripRectangle(float(rng.uniform(0.5, 3)), float(rng.uniform(0.2, 1.5)))
        roots = []
        while len(roots) < int(rng.integers(1, 6)):
            z = complex(rng.uniform(-2, 2) * rect.T, rng.uniform(-2, 2) * rect.eta)
            if min(abs(abs(z.real) - rect.T) / rect.T, abs(abs(z.imag) - rect.eta) / rect.eta) > 0.02:
                roots.append(z)
        inside = sum(rect.contains(z) for z in roots)
        exact += winding_number(trace_boundary(log_form(_poly(roots)), rect)).winding == inside
    xi = {}
    for T in (3.0, 8.0):
        wr = winding_number(trace_boundary(log_form(lambda v: Xi(2 * np.asarray(v))), StripRectangle(T, 0.2)))
        xi[T] = (wr.winding, 2 * len(locate_real_zeros(2 * T)))
    radii = {winding_number(trace_boundary(log_form(_poly([0.4 + 0.5j, 0.4 + 0.5j, 0.1 - 0.1j])),
                                           StripRectangle(1.5, 0.5), indent_radius=r)).winding
             for r in (1e-2, 1e-3, 1e-4)}
    ok = exact == 50 and xi[3.0] == (0, 0) and xi[8.0] == (2, 2) and radii == {1}
    _record(8, ok, f"{exact}/50 polynomial windings exact, Xi windings {xi}, radius-independent counts {radii}")


def test_criterion_09_strip_riemann_lebesgue():
    pol = theta.TruncationPolicy()
    ws = [s * re + 1j * im for re in (25.0, 100.0) for im in (-0.4, 0.0, 0.4) for s in (1, -1)]
    rep = transforms.strip_RL_check(lambda y: theta.f_theta(y, pol), lambda y: theta.f_theta_derivative(y, pol),
                                    ws, QuadratureSpec())
    d = {e.w: e.defect for e in rep.entries}
    ok = all(d[s * 100.0 + 1j * im] < d[s * 25.0 + 1j * im] for im in (-0.4, 0.0, 0.4) for s in (1, -1))
    ratio = max(d[s * 100.0 + 1j * im] / d[s * 25.0 + 1j * im] for im in (-0.4, 0.0, 0.4) for s in (1, -1))
    _record(9, ok and all(e.converged for e in rep.entries), f"worst defect ratio |Re w| 100 vs 25: {ratio:.3f}")


def test_criterion_10_seam_diagnostics():
    lb = _check("seam-report", "lb_identity_stability")
    const = _check("seam-report", "twist_constancy", seam__twist_x=list(np.linspace(0.5, 3.0, 11)))
    stab = _check("seam-report", "twist_stability")
    cfg = load_config(text="", command="scan-rectangle", overrides=["scan.T=[2, 4, 8]", "scan.N=[16, 32, 64]"])
    env = run(cfg)
    doc = json.loads(dumps(env))
    jsonschema.validate(doc, load_schema())
    scans_ok = all(r["outcome"] == "diagnostic" and r["error"] is None for r in doc["records"])
    ok = lb.outcome == "pass" and const.outcome == "pass" and stab.outcome == "pass" and scans_ok
    _record(10, ok, f"lb residuals {lb.values['rounded']['base']} stable, twist spread "
                    f"{const.values['spread']:.1e}, twist fit stable {stab.outcome}, scans schema-valid {scans_ok}")
