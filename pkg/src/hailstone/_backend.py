"""Pick the compiled kernel when it is importable, else the Python twin.

Set HAILSTONE_PURE=1 to force the pure-Python path.
"""
import os

from hailstone import _pykernels

kernels = _pykernels
BACKEND = "python"

if os.environ.get("HAILSTONE_PURE", "") in ("", "0"):
    try:
        from hailstone import _kernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _kernels
        BACKEND = "cython"
