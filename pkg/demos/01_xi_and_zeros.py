"""Completed zeta, the Xi function on the real line, and its first zeros."""
import numpy as np

from seamlab.specfun import Xi, locate_real_zeros, xi_completed, zeta

# zeta itself, on both sides of the line Re s = -1/2 where the evaluator switches method
for s in (2.0, 0.5 + 14.134725j, -0.25, -3.5 + 1j):
    print(f"zeta({s}) = {complex(zeta(s)):.15g}")

# xi(w) = xi(1 - w); a few random points
w = np.array([0.3 + 2j, -1.5 + 0.7j, 2.5 - 4j])
print("reflection defect:", np.max(np.abs(xi_completed(w) - xi_completed(1 - w))))

# Xi is real and even on the real axis, with sign changes at the zero ordinates
z = np.linspace(0, 30, 7)
print(np.c_[z, Xi(z).real])

zl = locate_real_zeros(40.0)
print("ordinates below 40:", zl.ordinates)
