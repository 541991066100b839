"""The walk on the N-cycle: heat kernel, local CLT error and the spectral determinant."""
import math

import numpy as np

from seamlab.cycle import CycleModel, P_N, determinant_zeros, heat_kernel, scaling_limit_residual, ulclt_report

m = CycleModel(64)
p = heat_kernel(m, 1.0, np.arange(64))
print("total mass:", p.sum(), " p_t(0,0):", p[0], " gaussian:", 1 / math.sqrt(4 * math.pi))

# sup error against the Gaussian, scaled by N; a lattice effect keeps the raw error near 0.026
for N in (32, 64, 128, 256):
    r = ulclt_report(CycleModel(N), 1.0)
    print(f"N = {N:4d}  sup_error = {r.sup_error:.6f}  times N = {r.sup_error * N:.3f}")

# the scaling-limit trace converges, at rate N^-2
res = [scaling_limit_residual(N, 1.0) for N in (64, 128, 256)]
print("trace residuals:", res, " rate:", np.polyfit(np.log([64, 128, 256]), np.log(res), 1)[0])

# determinant zeros are real from N = 7 on
for N in (4, 7, 16):
    dz = determinant_zeros(N)
    print(f"N = {N:2d}  max imag = {dz.max_imag:.2e}  P_N(1) = {P_N(N, 1.0):.6g}")
