"""Hot-kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable LCGF_PURE_PYTHON is set to a non-empty value, the numpy
implementations are used. Both expose the same three functions.
"""
import os

from . import _kernels_py

if os.environ.get("LCGF_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = _impl.BACKEND
circular_box_sum = _impl.circular_box_sum
local_max_mask = _impl.local_max_mask
ball_cluster_sums = _impl.ball_cluster_sums

__all__ = ["BACKEND", "circular_box_sum", "local_max_mask", "ball_cluster_sums"]
