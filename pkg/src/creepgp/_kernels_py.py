"""Pure-NumPy implementations of the hot numerical kernels.

These mirror the signatures of the optional Cython extension
``creepgp._kernels_cy``; :mod:`creepgp.backend` picks one at import time.
"""

import numpy as np


def creep_curve(elapsed, phi0, beta_h, n):
    """Hyperbolic creep progression phi0 * (dt / (beta_h + dt))**n.

    ``elapsed`` is a 1-D array of days under load (>= 0); phi0, beta_h and
    n are scalars.  elapsed == 0 maps to exactly 0 (n > 0 is enforced by
    the caller).
    """
    dt = np.asarray(elapsed, dtype=np.float64)
    return phi0 * (dt / (beta_h + dt)) ** n


def se_kernel_from_sqdist(sqdist, signal_var, inv_two_l2):
    """Squared-exponential kernel from precomputed squared distances.

    Returns signal_var * exp(-sqdist * inv_two_l2) elementwise.
    """
    return signal_var * np.exp(-np.asarray(sqdist, dtype=np.float64) * inv_two_l2)
