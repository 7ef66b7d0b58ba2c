"""Hot-kernel dispatch: compiled extension if available, numpy fallback.

Set the environment variable ``OTLAPLACE_PURE=1`` before import to force the
pure-Python implementation (used by the benchmark and the parity tests).
"""

import os

from . import _kernels_py

if os.environ.get("OTLAPLACE_PURE"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

implementation = _impl.IMPLEMENTATION
solve_assignment = _impl.solve_assignment


def available_implementations():
    """Mapping of implementation name -> solve_assignment callable."""
    impls = {"python": _kernels_py.solve_assignment}
    try:
        from . import _kernels

        impls["cython"] = _kernels.solve_assignment
    except ImportError:
        pass
    return impls
