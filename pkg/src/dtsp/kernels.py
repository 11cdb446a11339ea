"""Backend selection for the hot kernels.

The compiled Cython module is used when it was built; otherwise the numpy
fallback in ``_pykernels`` is used. Setting ``DTSP_PURE_PYTHON=1`` forces the
fallback. ``BACKEND`` reports which one is active.
"""

import os

from . import _pykernels

if os.environ.get("DTSP_PURE_PYTHON"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

powdiff = _impl.powdiff
log_powdiff = _impl.log_powdiff
dlog_powdiff = _impl.dlog_powdiff
loglik_terms = _impl.loglik_terms
floor_quantile = _impl.floor_quantile

__all__ = [
    "BACKEND",
    "powdiff",
    "log_powdiff",
    "dlog_powdiff",
    "loglik_terms",
    "floor_quantile",
]
