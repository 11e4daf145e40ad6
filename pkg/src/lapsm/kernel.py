"""Hot-kernel selection.

The compiled ``_ckernel`` extension is used when it imports; otherwise the
pure-Python ``_pykernel`` is used.  Setting ``LAPSM_PURE_PYTHON=1`` forces the
fallback (the test suite runs both).
"""

import os

from . import _pykernel

BACKEND = "python"
_impl = _pykernel

if os.environ.get("LAPSM_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernel as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernel

mul_terms = _impl.mul_terms
deriv_terms = _impl.deriv_terms
add_scaled = _impl.add_scaled
row_combine = _impl.row_combine
normalize_row = _impl.normalize_row
odd_mask = _impl.odd_mask

__all__ = [
    "BACKEND",
    "mul_terms",
    "deriv_terms",
    "add_scaled",
    "row_combine",
    "normalize_row",
    "odd_mask",
]
