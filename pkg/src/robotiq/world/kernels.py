"""Geometry kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels when
the extension is missing or `ROBOTIQ_PURE_PYTHON=1` is set. The two backends
implement identical semantics (see `benchmarks/bench_kernels.py` for the
speed comparison).
"""

from __future__ import annotations

import os

from . import _purecore

if os.environ.get("ROBOTIQ_PURE_PYTHON", "") == "1":
    _impl = _purecore
    BACKEND = "python"
else:
    try:
        from . import _geomcore as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - build-env dependent
        _impl = _purecore
        BACKEND = "python"

integrate = _impl.integrate
ray_distance = _impl.ray_distance
raycast = _impl.raycast
collides = _impl.collides
