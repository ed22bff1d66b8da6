#!/usr/bin/env python3
"""Compiled vs pure-Python geometry kernels on the hot paths.

Run: python3 benchmarks/bench_kernels.py
"""

import math
import time

import numpy as np

from robotiq.world import _purecore, kernels
from robotiq.world.worldmap import Circle, Rect, Segment, WorldMap

try:
    from robotiq.world import _geomcore
except ImportError:
    _geomcore = None


def make_world() -> WorldMap:
    return WorldMap(
        bounds=Rect((0.0, 0.0), (4.0, 3.0)),
        obstacles=[
            Circle((1.5, 1.9), 0.28),
            Circle((2.6, 1.0), 0.28),
            Segment((0.5, 2.5), (1.2, 2.5)),
            Rect((3.0, 0.3), (3.6, 0.8)),
        ],
    )


def time_fn(fn, reps: int) -> float:
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def main() -> None:
    world = make_world()
    b, c, s, r = world.geometry_arrays()
    angles = 0.3 + np.linspace(-math.pi / 2, math.pi / 2, 25)
    out = np.empty(25)

    cases = {
        "raycast 25 rays": lambda impl: impl.raycast(2.0, 1.5, angles, 0.12, 3.5, b, c, s, r, out),
        "collision check": lambda impl: impl.collides(2.0, 1.5, 0.22, b, c, s, r),
        "integrate 0.1 s": lambda impl: impl.integrate(2.0, 1.5, 0.3, 0.2, 1.0, 0.1, 1e-3),
    }
    impls = {"pure-python": _purecore}
    if _geomcore is not None:
        impls["cython"] = _geomcore

    print(f"active backend: {kernels.BACKEND}\n")
    print(f"{'case':<18}" + "".join(f"{name:>16}" for name in impls) + f"{'speedup':>10}")
    for case, fn in cases.items():
        reps = 2000
        times = {name: time_fn(lambda impl=impl: fn(impl), reps) for name, impl in impls.items()}
        row = f"{case:<18}" + "".join(f"{times[n] * 1e6:>13.1f} us" for n in impls)
        if len(times) == 2:
            row += f"{times['pure-python'] / times['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
