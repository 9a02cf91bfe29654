"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the pure-Python
kernels are loaded. Set ``LATENTREE_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _kernels_py

if os.environ.get("LATENTREE_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"
