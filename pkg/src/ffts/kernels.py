"""Backend selection for the compiled kernels.

The Cython extension is used when it was built; otherwise the pure-Python
module provides identical functions.  Set ``FFTS_PURE_PYTHON=1`` to force the
fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("FFTS_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

pearson_residuals = _impl.pearson_residuals
hellinger_weights = _impl.hellinger_weights
wle_iterate = _impl.wle_iterate


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True
