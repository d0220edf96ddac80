"""Hot loops with a compiled backend and a pure Python fallback.

The compiled module is used when it imports; set GREEDYNET_KERNELS=python
to force the fallback.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("GREEDYNET_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

DELETE, SWAP, ADD = _pykernels.DELETE, _pykernels.SWAP, _pykernels.ADD


def backends() -> dict:
    """All importable backends by name."""
    out = {"python": _pykernels}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out


better = _impl.better
greedy_all_pairs = _impl.greedy_all_pairs
deviation_rows = _impl.deviation_rows
set_cost = _impl.set_cost
first_improving_move = _impl.first_improving_move
best_response_bb = _impl.best_response_bb
first_ge_violation = _impl.first_ge_violation
count_ge = _impl.count_ge
theta_route_all = _impl.theta_route_all
