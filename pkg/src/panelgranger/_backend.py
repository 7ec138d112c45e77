"""Kernel selection.

The compiled extension is used when it imports; setting
``PANELGRANGER_PURE_PYTHON=1`` forces the numpy fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

_NAMES = (
    "householder_lstsq",
    "nested_rss_batch",
    "simulate_ar1_pair",
    "rebuild_null_ar",
    "betainc_reg",
)


def _load_compiled() -> ModuleType | None:
    if os.environ.get("PANELGRANGER_PURE_PYTHON", "") not in ("", "0"):
        return None
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


compiled = _load_compiled()
kernels: ModuleType = compiled if compiled is not None else _fallback
name = "cython" if compiled is not None else "numpy"

householder_lstsq = kernels.householder_lstsq
nested_rss_batch = kernels.nested_rss_batch
simulate_ar1_pair = kernels.simulate_ar1_pair
rebuild_null_ar = kernels.rebuild_null_ar
betainc_reg = kernels.betainc_reg


def get(backend: str) -> ModuleType:
    """Return the kernel module for ``"cython"`` or ``"numpy"``."""
    if backend == "numpy":
        return _fallback
    if backend == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {backend!r}")
