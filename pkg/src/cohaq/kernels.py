"""Backend selection for the polynomial kernels.

The compiled extension is used when it imports cleanly; otherwise the
pure-Python fallback is used.  Setting ``COHAQ_PURE_PYTHON=1`` forces the
fallback (useful for benchmarking and for debugging).
"""

from __future__ import annotations

import os
from types import ModuleType

from cohaq import _kernels_py


def _select() -> tuple[ModuleType, str]:
    if os.environ.get("COHAQ_PURE_PYTHON", "").strip() not in ("", "0"):
        return _kernels_py, "python"
    try:
        from cohaq import _kernels  # type: ignore[attr-defined]
    except ImportError:
        return _kernels_py, "python"
    return _kernels, "cython"


_impl, BACKEND = _select()

mul = _impl.mul
addmul = _impl.addmul
add_scaled = _impl.add_scaled
shift = _impl.shift
max_degree = _impl.max_degree
split_by_mask = _impl.split_by_mask
collect_field = _impl.collect_field
rename = _impl.rename

FIELD_BITS = _kernels_py.FIELD_BITS
FIELD_MASK = _kernels_py.FIELD_MASK

__all__ = [
    "BACKEND",
    "FIELD_BITS",
    "FIELD_MASK",
    "add_scaled",
    "addmul",
    "collect_field",
    "max_degree",
    "mul",
    "rename",
    "shift",
    "split_by_mask",
]
