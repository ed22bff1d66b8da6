# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled geometry kernels: same contract as `_purecore`, built for the
inner loops (lidar raycasts, collision tests, unicycle integration)."""

from libc.math cimport cos, sin, sqrt, ceil, fabs, INFINITY

DEF PARALLEL_EPS = 1e-15


def integrate(double x, double y, double theta, double v, double omega,
              double dt, double h_max):
    cdef int n = <int>ceil(dt / h_max - 1e-12)
    if n < 1:
        n = 1
    cdef double h = dt / n
    cdef double half, full, kx, ky
    cdef int i
    for i in range(n):
        half = theta + 0.5 * h * omega
        full = theta + h * omega
        kx = cos(theta) + 4.0 * cos(half) + cos(full)
        ky = sin(theta) + 4.0 * sin(half) + sin(full)
        x += v * h * kx / 6.0
        y += v * h * ky / 6.0
        theta = full
    return x, y, theta


cdef inline double _ray_circle(double ox, double oy, double dx, double dy,
                               double cx, double cy, double r) nogil:
    cdef double fx = ox - cx
    cdef double fy = oy - cy
    cdef double c0 = fx * fx + fy * fy - r * r
    cdef double b, disc, t
    if c0 <= 0.0:
        return 0.0
    b = dx * fx + dy * fy
    disc = b * b - c0
    if disc < 0.0:
        return INFINITY
    t = -b - sqrt(disc)
    if t >= 0.0:
        return t
    return INFINITY


cdef inline double _ray_segment(double ox, double oy, double dx, double dy,
                                double x1, double y1, double x2, double y2) nogil:
    cdef double ex = x2 - x1
    cdef double ey = y2 - y1
    cdef double denom = dx * ey - dy * ex
    cdef double px = x1 - ox
    cdef double py = y1 - oy
    cdef double t, s, t1, t2, lo, hi
    if fabs(denom) < PARALLEL_EPS:
        if fabs(px * dy - py * dx) > 1e-12:
            return INFINITY
        t1 = px * dx + py * dy
        t2 = (x2 - ox) * dx + (y2 - oy) * dy
        lo = t1 if t1 < t2 else t2
        hi = t2 if t1 < t2 else t1
        if hi < 0.0:
            return INFINITY
        return lo if lo > 0.0 else 0.0
    t = (px * ey - py * ex) / denom
    s = (px * dy - py * dx) / denom
    if t >= 0.0 and 0.0 <= s <= 1.0:
        return t
    return INFINITY


cdef inline double _ray_rect(double ox, double oy, double dx, double dy,
                             double minx, double miny, double maxx, double maxy) nogil:
    cdef double tmin = -INFINITY
    cdef double tmax = INFINITY
    cdef double t0, t1, tmp
    if minx <= ox <= maxx and miny <= oy <= maxy:
        return 0.0
    if fabs(dx) < PARALLEL_EPS:
        if ox < minx or ox > maxx:
            return INFINITY
    else:
        t0 = (minx - ox) / dx
        t1 = (maxx - ox) / dx
        if t0 > t1:
            tmp = t0; t0 = t1; t1 = tmp
        if t0 > tmin:
            tmin = t0
        if t1 < tmax:
            tmax = t1
    if fabs(dy) < PARALLEL_EPS:
        if oy < miny or oy > maxy:
            return INFINITY
    else:
        t0 = (miny - oy) / dy
        t1 = (maxy - oy) / dy
        if t0 > t1:
            tmp = t0; t0 = t1; t1 = tmp
        if t0 > tmin:
            tmin = t0
        if t1 < tmax:
            tmax = t1
    if tmax < tmin or tmax < 0.0:
        return INFINITY
    if tmin >= 0.0:
        return tmin
    return INFINITY


cdef inline double _ray_bounds_exit(double ox, double oy, double dx, double dy,
                                    double minx, double miny, double maxx,
                                    double maxy) nogil:
    cdef double t = INFINITY
    cdef double c
    if ox < minx or ox > maxx or oy < miny or oy > maxy:
        return 0.0
    if dx > PARALLEL_EPS:
        c = (maxx - ox) / dx
        if c < t:
            t = c
    elif dx < -PARALLEL_EPS:
        c = (minx - ox) / dx
        if c < t:
            t = c
    if dy > PARALLEL_EPS:
        c = (maxy - oy) / dy
        if c < t:
            t = c
    elif dy < -PARALLEL_EPS:
        c = (miny - oy) / dy
        if c < t:
            t = c
    return t


cdef double _ray_distance(double ox, double oy, double angle,
                          double[:] bounds, double[:, :] circles,
                          double[:, :] segments, double[:, :] rects) nogil:
    cdef double dx = cos(angle)
    cdef double dy = sin(angle)
    cdef double best = _ray_bounds_exit(ox, oy, dx, dy,
                                        bounds[0], bounds[1], bounds[2], bounds[3])
    cdef double t
    cdef Py_ssize_t i
    for i in range(circles.shape[0]):
        t = _ray_circle(ox, oy, dx, dy, circles[i, 0], circles[i, 1], circles[i, 2])
        if t < best:
            best = t
    for i in range(segments.shape[0]):
        t = _ray_segment(ox, oy, dx, dy, segments[i, 0], segments[i, 1],
                         segments[i, 2], segments[i, 3])
        if t < best:
            best = t
    for i in range(rects.shape[0]):
        t = _ray_rect(ox, oy, dx, dy, rects[i, 0], rects[i, 1],
                      rects[i, 2], rects[i, 3])
        if t < best:
            best = t
    return best


def ray_distance(double ox, double oy, double angle, double[:] bounds,
                 double[:, :] circles, double[:, :] segments, double[:, :] rects):
    return _ray_distance(ox, oy, angle, bounds, circles, segments, rects)


def raycast(double ox, double oy, double[:] angles, double r_min, double r_max,
            double[:] bounds, double[:, :] circles, double[:, :] segments,
            double[:, :] rects, double[:] out):
    cdef Py_ssize_t k
    cdef double t
    for k in range(angles.shape[0]):
        t = _ray_distance(ox, oy, angles[k], bounds, circles, segments, rects)
        if t > r_max:
            t = r_max
        elif t < r_min:
            t = r_min
        out[k] = t
    return out


cdef inline double _point_segment_dist_sq(double px, double py, double x1,
                                          double y1, double x2, double y2) nogil:
    cdef double ex = x2 - x1
    cdef double ey = y2 - y1
    cdef double ln = ex * ex + ey * ey
    cdef double u, dx, dy
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


def collides(double px, double py, double radius, double[:] bounds,
             double[:, :] circles, double[:, :] segments, double[:, :] rects):
    cdef Py_ssize_t i
    cdef double dx, dy, reach, d2
    if (px - bounds[0] <= radius or bounds[2] - px <= radius or
            py - bounds[1] <= radius or bounds[3] - py <= radius):
        return True
    for i in range(circles.shape[0]):
        dx = px - circles[i, 0]
        dy = py - circles[i, 1]
        reach = radius + circles[i, 2]
        if dx * dx + dy * dy <= reach * reach:
            return True
    for i in range(segments.shape[0]):
        d2 = _point_segment_dist_sq(px, py, segments[i, 0], segments[i, 1],
                                    segments[i, 2], segments[i, 3])
        if d2 <= radius * radius:
            return True
    for i in range(rects.shape[0]):
        dx = rects[i, 0] - px
        if dx < 0.0:
            dx = px - rects[i, 2]
        if dx < 0.0:
            dx = 0.0
        dy = rects[i, 1] - py
        if dy < 0.0:
            dy = py - rects[i, 3]
        if dy < 0.0:
            dy = 0.0
        if dx * dx + dy * dy <= radius * radius:
            return True
    return False
