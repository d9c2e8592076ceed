"""Scalar-kind dispatch: the same closed-form expressions evaluate on plain
floats (values) or on jets (values plus first/second partials).

The compiled jet kernel is preferred; EPSLAB_PURE=1 forces the pure-Python
lane (the two are interchangeable and benchmarked against each other).
"""

from __future__ import annotations

import math
import os

if os.environ.get("EPSLAB_PURE"):
    from . import _jets_py as _impl

    JET_BACKEND = "python"
else:
    try:
        from . import _jets as _impl  # type: ignore[no-redef]

        JET_BACKEND = "cython"
    except ImportError:
        from . import _jets_py as _impl  # type: ignore[no-redef]

        JET_BACKEND = "python"

Jet = _impl.Jet
jet_atan2 = _impl.atan2
bracket = _impl.bracket
bracket_grad = _impl.bracket_grad
nested_bracket = _impl.nested_bracket

NVARS = 8


def sqrt(x):
    if isinstance(x, (float, int)):
        return math.sqrt(x)
    return x.sqrt()


def sin(x):
    if isinstance(x, (float, int)):
        return math.sin(x)
    return x.sin()


def cos(x):
    if isinstance(x, (float, int)):
        return math.cos(x)
    return x.cos()


def atan2(y, x):
    if isinstance(y, (float, int)) and isinstance(x, (float, int)):
        return math.atan2(y, x)
    return jet_atan2(y, x)


def value_of(x) -> float:
    """Plain value of a float or jet."""
    if isinstance(x, (float, int)):
        return float(x)
    return x.v
