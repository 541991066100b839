"""Winding numbers on strip rectangles, and the seam-ratio scans."""
import numpy as np

from seamlab.contour import StripRectangle, log_form, trace_boundary, winding_number
from seamlab.specfun import Xi
from seamlab.strip import sector_scan, separation_scan, zero_divisor_compare

xi2 = log_form(lambda w: Xi(2 * np.asarray(w)))
for T in (3.0, 8.0, 11.0):
    wr = winding_number(trace_boundary(xi2, StripRectangle(T, 0.2)))
    print(f"T = {T:4}: winding of Xi(2w) = {wr.winding}  (max step {wr.max_step:.3f})")

# the scans measure; none of these outcomes is asserted
for T, N in ((2.0, 16), (4.0, 32), (8.0, 64)):
    rect = StripRectangle(T, 0.2)
    sep = separation_scan(rect, N)
    sec = sector_scan(rect, N)
    div = zero_divisor_compare(rect, N)
    print(f"T = {T}, N = {N}: separation holds {sep.holds} (log margin {sep.log_inf_ref - sep.log_sup_diff:.2f}), "
          f"theta_max {sec.theta_max:.2f}, windings {div.winding_X} vs {div.real_zeros_PN_in_T}")
