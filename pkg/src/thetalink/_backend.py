"""Kernel selection: compiled extension when importable, numpy fallback otherwise.

Set ``THETALINK_PURE=1`` to force the fallback (benchmarks and cross-checks).
"""
import os

from thetalink import _fallback

BACKEND = "python"
kernels = _fallback

if os.environ.get("THETALINK_PURE", "") not in ("1", "true", "yes"):
    try:
        from thetalink import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        kernels = _compiled
        BACKEND = "cython"


def get(name):
    """Kernel module for ``name`` in {"cython", "python"}."""
    if name == "python":
        return _fallback
    if name == "cython":
        from thetalink import _kernels
        return _kernels
    raise ValueError(f"unknown backend {name!r}")
