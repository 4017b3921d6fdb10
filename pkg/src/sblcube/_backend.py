"""Select the compiled kernel module when importable, else the pure-Python one.

Set ``SBLCUBE_PURE=1`` to force the fallback (used by the benchmark and the
backend-equivalence tests).
"""

import os

from . import _kernels_py as pure

compiled = None
if os.environ.get("SBLCUBE_PURE") != "1":
    try:
        from . import _kernels as compiled
    except ImportError:
        compiled = None

kernels = compiled if compiled is not None else pure
BACKEND = "compiled" if compiled is not None else "python"


def bareiss_det(rows):
    if compiled is not None:
        try:
            return compiled.bareiss_det(rows)
        except OverflowError:
            pass
    return pure.bareiss_det(rows)


def bareiss_echelon(rows):
    if compiled is not None:
        try:
            return compiled.bareiss_echelon(rows)
        except OverflowError:
            pass
    return pure.bareiss_echelon(rows)


def greedy_separated(candidates, sep):
    return kernels.greedy_separated(candidates, sep)


def nearest_distance(points, centers):
    return kernels.nearest_distance(points, centers)
