"""Pure-Python geometry kernels.

Fallback used when the compiled extension (`_geomcore`) is unavailable.
Both implementations expose the same functions over the same flat arrays:

    bounds   float64[4]      (min_x, min_y, max_x, max_y)
    circles  float64[C, 3]   (cx, cy, radius)
    segments float64[S, 4]   (x1, y1, x2, y2)
    rects    float64[R, 4]   (min_x, min_y, max_x, max_y)

Conventions shared with the marching-containment view of the world:
a ray origin already inside an obstacle (or outside the bounds) hits at
distance 0, and disc/obstacle tangency counts as contact.
"""

from __future__ import annotations

import math

INF = math.inf
_PARALLEL_EPS = 1e-15


def integrate(
    x: float, y: float, theta: float, v: float, omega: float, dt: float, h_max: float
) -> tuple[float, float, float]:
    """Advance unicycle state (x' = v cos th, y' = v sin th, th' = w) by dt.

    RK4 over substeps no longer than h_max. Theta in the result is raw
    (unwrapped); callers wrap it.
    """
    n = max(1, int(math.ceil(dt / h_max - 1e-12)))
    h = dt / n
    for _ in range(n):
        half = theta + 0.5 * h * omega
        full = theta + h * omega
        kx = math.cos(theta) + 4.0 * math.cos(half) + math.cos(full)
        ky = math.sin(theta) + 4.0 * math.sin(half) + math.sin(full)
        x += v * h * kx / 6.0
        y += v * h * ky / 6.0
        theta = full
    return x, y, theta


def _ray_circle(ox, oy, dx, dy, cx, cy, r) -> float:
    fx = ox - cx
    fy = oy - cy
    c0 = fx * fx + fy * fy - r * r
    if c0 <= 0.0:  # origin inside or on the circle
        return 0.0
    b = dx * fx + dy * fy
    disc = b * b - c0
    if disc < 0.0:
        return INF
    t = -b - math.sqrt(disc)
    return t if t >= 0.0 else INF


def _ray_segment(ox, oy, dx, dy, x1, y1, x2, y2) -> float:
    ex = x2 - x1
    ey = y2 - y1
    denom = dx * ey - dy * ex
    px = x1 - ox
    py = y1 - oy
    if abs(denom) < _PARALLEL_EPS:
        # Parallel: only a collinear overlap can hit.
        if abs(px * dy - py * dx) > 1e-12:
            return INF
        t1 = px * dx + py * dy
        t2 = (x2 - ox) * dx + (y2 - oy) * dy
        lo = min(t1, t2)
        hi = max(t1, t2)
        if hi < 0.0:
            return INF
        return max(lo, 0.0)
    t = (px * ey - py * ex) / denom
    s = (px * dy - py * dx) / denom
    if t >= 0.0 and 0.0 <= s <= 1.0:
        return t
    return INF


def _ray_rect(ox, oy, dx, dy, minx, miny, maxx, maxy) -> float:
    if minx <= ox <= maxx and miny <= oy <= maxy:
        return 0.0
    tmin = -INF
    tmax = INF
    if abs(dx) < _PARALLEL_EPS:
        if ox < minx or ox > maxx:
            return INF
    else:
        t0 = (minx - ox) / dx
        t1 = (maxx - ox) / dx
        if t0 > t1:
            t0, t1 = t1, t0
        tmin = max(tmin, t0)
        tmax = min(tmax, t1)
    if abs(dy) < _PARALLEL_EPS:
        if oy < miny or oy > maxy:
            return INF
    else:
        t0 = (miny - oy) / dy
        t1 = (maxy - oy) / dy
        if t0 > t1:
            t0, t1 = t1, t0
        tmin = max(tmin, t0)
        tmax = min(tmax, t1)
    if tmax < tmin or tmax < 0.0:
        return INF
    return tmin if tmin >= 0.0 else INF


def _ray_bounds_exit(ox, oy, dx, dy, minx, miny, maxx, maxy) -> float:
    """Distance to leaving the bounds box; 0 if the origin is already outside."""
    if ox < minx or ox > maxx or oy < miny or oy > maxy:
        return 0.0
    t = INF
    if dx > _PARALLEL_EPS:
        t = min(t, (maxx - ox) / dx)
    elif dx < -_PARALLEL_EPS:
        t = min(t, (minx - ox) / dx)
    if dy > _PARALLEL_EPS:
        t = min(t, (maxy - oy) / dy)
    elif dy < -_PARALLEL_EPS:
        t = min(t, (miny - oy) / dy)
    return t


def ray_distance(ox, oy, angle, bounds, circles, segments, rects) -> float:
    """Smallest non-negative distance to any obstacle surface or the bounds."""
    dx = math.cos(angle)
    dy = math.sin(angle)
    best = _ray_bounds_exit(ox, oy, dx, dy, bounds[0], bounds[1], bounds[2], bounds[3])
    for i in range(circles.shape[0]):
        t = _ray_circle(ox, oy, dx, dy, circles[i, 0], circles[i, 1], circles[i, 2])
        if t < best:
            best = t
    for i in range(segments.shape[0]):
        t = _ray_segment(
            ox, oy, dx, dy, segments[i, 0], segments[i, 1], segments[i, 2], segments[i, 3]
        )
        if t < best:
            best = t
    for i in range(rects.shape[0]):
        t = _ray_rect(ox, oy, dx, dy, rects[i, 0], rects[i, 1], rects[i, 2], rects[i, 3])
        if t < best:
            best = t
    return best


def raycast(ox, oy, angles, r_min, r_max, bounds, circles, segments, rects, out):
    """Batch of rays from one origin; hits clamped into [r_min, r_max]."""
    for k in range(len(angles)):
        t = ray_distance(ox, oy, angles[k], bounds, circles, segments, rects)
        if t > r_max:
            t = r_max
        elif t < r_min:
            t = r_min
        out[k] = t
    return out


def _point_segment_dist_sq(px, py, x1, y1, x2, y2) -> float:
    ex = x2 - x1
    ey = y2 - y1
    ln = ex * ex + ey * ey
    if ln <= 0.0:
        dx = px - x1
        dy = py - y1
        return dx * dx + dy * dy
    u = ((px - x1) * ex + (py - y1) * ey) / ln
    if u < 0.0:
        u = 0.0
    elif u > 1.0:
        u = 1.0
    dx = px - (x1 + u * ex)
    dy = py - (y1 + u * ey)
    return dx * dx + dy * dy


def collides(px, py, radius, bounds, circles, segments, rects) -> bool:
    """Disc vs world test. Tangency counts as contact; leaving bounds counts."""
    if (
        px - bounds[0] <= radius
        or bounds[2] - px <= radius
        or py - bounds[1] <= radius
        or bounds[3] - py <= radius
    ):
        return True
    for i in range(circles.shape[0]):
        dx = px - circles[i, 0]
        dy = py - circles[i, 1]
        reach = radius + circles[i, 2]
        if dx * dx + dy * dy <= reach * reach:
            return True
    for i in range(segments.shape[0]):
        d2 = _point_segment_dist_sq(
            px, py, segments[i, 0], segments[i, 1], segments[i, 2], segments[i, 3]
        )
        if d2 <= radius * radius:
            return True
    for i in range(rects.shape[0]):
        dx = max(rects[i, 0] - px, 0.0, px - rects[i, 2])
        dy = max(rects[i, 1] - py, 0.0, py - rects[i, 3])
        if dx * dx + dy * dy <= radius * radius:
            return True
    return False
