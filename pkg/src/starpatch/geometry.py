"""Small 2D helpers used across the pipeline.

Points are plain ``(x, y)`` float tuples so they can serve as exact
dictionary keys; vector arithmetic goes through these helpers instead of
numpy to keep single-point operations allocation-free and bit-stable.
"""

import math

Point = tuple  # (x, y)


def add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def scale(v, s):
    return (v[0] * s, v[1] * s)


def dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def norm(v):
    return math.hypot(v[0], v[1])


def dist(a, b):
    return math.hypot(a[0] - b[0], a[1] - b[1])


def normalize(v):
    n = norm(v)
    if n == 0.0:
        raise ValueError("cannot normalize zero vector")
    return (v[0] / n, v[1] / n)


def rotate(v, angle):
    c, s = math.cos(angle), math.sin(angle)
    return (c * v[0] - s * v[1], s * v[0] + c * v[1])


def perp(v):
    """Counterclockwise quarter turn."""
    return (-v[1], v[0])


def midpoint(a, b):
    return ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)


def lerp(a, b, t):
    return (a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t)


def angle_of(v):
    return math.atan2(v[1], v[0])


def from_polar(r, angle):
    return (r * math.cos(angle), r * math.sin(angle))


def signed_area(points):
    """Twice-halved shoelace; positive for counterclockwise polygons."""
    area = 0.0
    n = len(points)
    for i in range(n):
        x1, y1 = points[i]
        x2, y2 = points[(i + 1) % n]
        area += x1 * y2 - x2 * y1
    return area / 2.0


def centroid(points):
    n = len(points)
    return (sum(p[0] for p in points) / n, sum(p[1] for p in points) / n)


def is_ccw(points):
    return signed_area(points) > 0.0


def ray_intersection(o1, d1, o2, d2, eps=1e-12):
    """Parameters (t, s) with o1 + t*d1 == o2 + s*d2, or None if parallel."""
    det = cross(d1, d2)
    if abs(det) < eps:
        return None
    w = sub(o2, o1)
    t = cross(w, d2) / det
    s = cross(w, d1) / det
    return t, s


def segments_properly_intersect(p1, p2, q1, q2, eps=1e-12):
    """True when open segments cross at an interior point of both."""
    d1 = sub(p2, p1)
    d2 = sub(q2, q1)
    hit = ray_intersection(p1, d1, q1, d2, eps)
    if hit is None:
        return False
    t, s = hit
    return eps < t < 1.0 - eps and eps < s < 1.0 - eps


def point_in_polygon(pt, points, tol=1e-9):
    """Winding test; points on the boundary count as inside within tol."""
    n = len(points)
    for i in range(n):
        a, b = points[i], points[(i + 1) % n]
        if _point_on_segment(pt, a, b, tol):
            return True
    inside = False
    x, y = pt
    for i in range(n):
        (x1, y1), (x2, y2) = points[i], points[(i + 1) % n]
        if (y1 > y) != (y2 > y):
            xi = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xi:
                inside = not inside
    return inside


def _point_on_segment(pt, a, b, tol):
    d = sub(b, a)
    w = sub(pt, a)
    L = norm(d)
    if L == 0.0:
        return dist(pt, a) <= tol
    if abs(cross(d, w)) / L > tol:
        return False
    t = dot(d, w) / (L * L)
    return -tol <= t <= 1.0 + tol


def dist_point_segment(pt, a, b):
    d = sub(b, a)
    L2 = dot(d, d)
    if L2 == 0.0:
        return dist(pt, a)
    t = max(0.0, min(1.0, dot(sub(pt, a), d) / L2))
    return dist(pt, lerp(a, b, t))


def convex_hull(points):
    """Andrew monotone chain; returns hull in ccw order."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return list(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(sub(out[-1], out[-2]), sub(p, out[-2])) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def polygon_area(points):
    return abs(signed_area(points))
