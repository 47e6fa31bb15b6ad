"""Kernel backend chosen at import time.

The Cython extension is used when it was built; otherwise, or when the
environment variable ``QGAMELAB_PURE`` is set to a non-empty value, the numpy
fallback in :mod:`qgamelab._pykernels` is used.
"""

import os

from . import _pykernels

try:
    if os.environ.get("QGAMELAB_PURE"):
        raise ImportError("pure-Python backend requested")
    from . import _kernels as kernels

    BACKEND = "cython"
except ImportError:
    kernels = _pykernels
    BACKEND = "python"

__all__ = ["kernels", "BACKEND"]
