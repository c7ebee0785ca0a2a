"""Backend selection for the Gram-Schmidt kernels.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``CTRL_EXPR_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the numpy fallback is used.
"""
import os

from . import _kernels_py

_force_python = os.environ.get("CTRL_EXPR_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"
    else:
        BACKEND = "cython"

incremental_rank = _impl.incremental_rank
gs_insert = _impl.gs_insert

__all__ = ["BACKEND", "incremental_rank", "gs_insert"]
