"""Numerical toolkit for theta kernels, Mellin and Laplace transforms, cycle spectra and strip scans."""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
