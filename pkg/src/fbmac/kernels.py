"""Kernel dispatch: the compiled extension if importable, else numpy.

Set ``FBMAC_PURE_PYTHON=1`` to force the numpy route.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("FBMAC_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py

min_dual_bound = _impl.min_dual_bound
feedback_loop = _impl.feedback_loop

__all__ = ["BACKEND", "feedback_loop", "min_dual_bound"]
