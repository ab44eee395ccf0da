"""Oriented rectangle footprints and minimum-distance queries between them.

Rectangles are convex, so the closest pair between two of them is found by
exhaustive vertex-to-edge checks over the 4x4 edge sets; no broad-phase or
general polygon machinery is needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.fmod(angle + math.pi, 2.0 * math.pi)
    if wrapped <= 0.0:
        wrapped += 2.0 * math.pi
    return wrapped - math.pi


@dataclass(frozen=True)
class Pose2D:
    x: float
    y: float
    heading: float

    def __post_init__(self):
        object.__setattr__(self, "heading", normalize_angle(self.heading))


@dataclass(frozen=True)
class OrientedRectangle:
    center: Pose2D
    half_length: float  # along heading
    half_width: float   # perpendicular to heading

    def __post_init__(self):
        if self.half_length <= 0.0 or self.half_width <= 0.0:
            raise ValueError("rectangle half-extents must be positive")


@dataclass(frozen=True)
class ClosestPair:
    on_a: tuple[float, float]
    on_b: tuple[float, float]
    distance: float
    offset_a: tuple[float, float]  # displacement from rectangle A's center to on_a


def corners(rect: OrientedRectangle) -> list[tuple[float, float]]:
    """Four corners, counter-clockwise starting from front-left."""
    c, s = math.cos(rect.center.heading), math.sin(rect.center.heading)
    hl, hw = rect.half_length, rect.half_width
    cx, cy = rect.center.x, rect.center.y
    local = ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
    return [(cx + c * lx - s * ly, cy + s * lx + c * ly) for lx, ly in local]


def _project_extent(pts, ax, ay):
    vals = [px * ax + py * ay for px, py in pts]
    return min(vals), max(vals)


def rectangles_intersect(a: OrientedRectangle, b: OrientedRectangle) -> bool:
    """Separating-axis test; touching counts as intersecting."""
    pa, pb = corners(a), corners(b)
    for heading in (a.center.heading, b.center.heading):
        c, s = math.cos(heading), math.sin(heading)
        for ax, ay in ((c, s), (-s, c)):
            lo_a, hi_a = _project_extent(pa, ax, ay)
            lo_b, hi_b = _project_extent(pb, ax, ay)
            if hi_a < lo_b or hi_b < lo_a:
                return False
    return True


def _point_segment_closest(px, py, ax, ay, bx, by):
    """Closest point on segment AB to P; returns (distance, point)."""
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        t = 0.0
    else:
        t = ((px - ax) * dx + (py - ay) * dy) / denom
        t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    qx, qy = ax + t * dx, ay + t * dy
    return math.hypot(px - qx, py - qy), (qx, qy)


def _segment_pair_closest(p1, p2, q1, q2):
    """Minimum-distance witness pair between two segments known not to cross.

    Returns (distance, on_p, on_q, parallel_overlap). The distance is the
    min over the four endpoint-to-segment checks, which is exact for
    non-crossing segments and symmetric under argument swap. For parallel
    segments whose projections overlap, the witness on P is moved to the
    midpoint of the overlap so the result is deterministic.
    """
    cands = []
    d, q = _point_segment_closest(p1[0], p1[1], q1[0], q1[1], q2[0], q2[1])
    cands.append((d, p1, q))
    d, q = _point_segment_closest(p2[0], p2[1], q1[0], q1[1], q2[0], q2[1])
    cands.append((d, p2, q))
    d, p = _point_segment_closest(q1[0], q1[1], p1[0], p1[1], p2[0], p2[1])
    cands.append((d, p, q1))
    d, p = _point_segment_closest(q2[0], q2[1], p1[0], p1[1], p2[0], p2[1])
    cands.append((d, p, q2))
    best = min(cands, key=lambda c: c[0])

    # Parallel-overlap tie-break: witness at the midpoint of the overlap span.
    ux, uy = p2[0] - p1[0], p2[1] - p1[1]
    vx, vy = q2[0] - q1[0], q2[1] - q1[1]
    cross = ux * vy - uy * vx
    scale = math.hypot(ux, uy) * math.hypot(vx, vy)
    if scale > 0.0 and abs(cross) <= 1e-12 * scale:
        denom = ux * ux + uy * uy
        t1 = ((q1[0] - p1[0]) * ux + (q1[1] - p1[1]) * uy) / denom
        t2 = ((q2[0] - p1[0]) * ux + (q2[1] - p1[1]) * uy) / denom
        lo, hi = max(0.0, min(t1, t2)), min(1.0, max(t1, t2))
        if lo < hi:
            tm = 0.5 * (lo + hi)
            on_p = (p1[0] + tm * ux, p1[1] + tm * uy)
            _, on_q = _point_segment_closest(on_p[0], on_p[1], q1[0], q1[1], q2[0], q2[1])
            return best[0], on_p, on_q, True
    return best[0], best[1], best[2], False


def closest_pair(a: OrientedRectangle, b: OrientedRectangle) -> ClosestPair:
    """Globally minimal-distance point pair between two oriented rectangles.

    Overlapping rectangles return distance 0 with both witness points at the
    midpoint of the two centers.
    """
    if rectangles_intersect(a, b):
        mid = (0.5 * (a.center.x + b.center.x), 0.5 * (a.center.y + b.center.y))
        return ClosestPair(mid, mid, 0.0,
                           (mid[0] - a.center.x, mid[1] - a.center.y))

    pa, pb = corners(a), corners(b)
    best_d = math.inf
    best_pair = None
    best_parallel = False
    for i in range(4):
        ea = (pa[i], pa[(i + 1) % 4])
        for j in range(4):
            eb = (pb[j], pb[(j + 1) % 4])
            d, on_a, on_b, parallel = _segment_pair_closest(ea[0], ea[1],
                                                            eb[0], eb[1])
            tol = 1e-12 * (1.0 + best_d) if math.isfinite(best_d) else 0.0
            if d < best_d - tol or (parallel and not best_parallel
                                    and d <= best_d + tol):
                # ties go to parallel-face midpoints for a deterministic,
                # perturbation-stable witness
                best_d = min(d, best_d)
                best_pair = (on_a, on_b)
                best_parallel = parallel
    on_a, on_b = best_pair
    return ClosestPair(on_a, on_b, best_d,
                       (on_a[0] - a.center.x, on_a[1] - a.center.y))
