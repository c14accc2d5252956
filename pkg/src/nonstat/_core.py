"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the NumPy
fallback. Set ``NONSTAT_PURE_PYTHON=1`` to force the fallback.
"""

import os

BACKEND = "python"
if not os.environ.get("NONSTAT_PURE_PYTHON"):
    try:
        from nonstat import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = None
else:
    _impl = None

if _impl is None:
    from nonstat import _kernels_py as _impl

durbin_levinson_sample = _impl.durbin_levinson_sample
tvar_filter = _impl.tvar_filter
frac_diff_filter = _impl.frac_diff_filter
trig_sums = _impl.trig_sums
ar1_panel_sum = _impl.ar1_panel_sum

__all__ = [
    "BACKEND",
    "durbin_levinson_sample",
    "tvar_filter",
    "frac_diff_filter",
    "trig_sums",
    "ar1_panel_sum",
]
