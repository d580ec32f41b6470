"""Kernel backend selection.

The compiled extension is used when importable; set ``ACCESSAUTH_PURE_PYTHON=1``
to force the pure-Python kernels.
"""
import os

from . import _kernels_py

if os.environ.get("ACCESSAUTH_PURE_PYTHON", "").strip() not in ("", "0"):
    kernels = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        kernels = _kernels_py
        BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
