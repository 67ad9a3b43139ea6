"""Import-time selection between the Cython and pure-NumPy kernels.

Set CREEPGP_PURE_PYTHON=1 to force the NumPy fallback (used by the
cross-backend tests and the benchmark).
"""

import os

from . import _kernels_py

if os.environ.get("CREEPGP_PURE_PYTHON"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels_cy as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

creep_curve = _impl.creep_curve
se_kernel_from_sqdist = _impl.se_kernel_from_sqdist
