"""Picks the NoC kernel backend at import time.

The compiled kernel is used when it was built; set ``CRITNOC_KERNEL=python``
to force the pure-Python reference implementation.
"""
from __future__ import annotations

import os

from . import _pykernel

_requested = os.environ.get("CRITNOC_KERNEL", "auto").lower()
if _requested not in ("auto", "python", "cython"):
    raise ImportError(f"CRITNOC_KERNEL must be auto, python or cython, not {_requested!r}")

_ckernel = None
if _requested != "python":
    try:
        from . import _ckernel
    except ImportError:
        if _requested == "cython":
            raise

BACKENDS = {"python": _pykernel.NocKernel}
if _ckernel is not None:
    BACKENDS["cython"] = _ckernel.NocKernel

BACKEND = "cython" if _ckernel is not None else "python"
NocKernel = BACKENDS[BACKEND]


def get_kernel(name: str | None = None):
    """Kernel class by backend name (``None`` = the import-time default)."""
    if name is None:
        return NocKernel
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"NoC backend {name!r} not available "
                         f"(have: {', '.join(sorted(BACKENDS))})") from None
