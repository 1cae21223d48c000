"""Planar vector-curve primitives: points, linear/quadratic Bezier segments,
paths, and polygonal regions used by the output-domain constraint.

All values are immutable after construction and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "Point2",
    "CurveSegment",
    "Path",
    "Region",
    "arc_length",
    "point_at",
    "tangent_at",
    "distance_to_boundary",
    "contains",
]

@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("point coordinates must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class CurveSegment:
    """A line (2 control points) or quadratic Bezier (3 control points)."""

    kind: str  # "line" | "quadratic"
    points: tuple  # tuple of Point2

    def __post_init__(self):
        if self.kind == "line":
            if len(self.points) != 2:
                raise ValueError("line segment needs exactly 2 control points")
        elif self.kind == "quadratic":
            if len(self.points) != 3:
                raise ValueError("quadratic segment needs exactly 3 control points")
        else:
            raise ValueError(f"unknown segment kind {self.kind!r}")
        object.__setattr__(self, "points", tuple(self.points))

    @property
    def start(self) -> Point2:
        return self.points[0]

    @property
    def end(self) -> Point2:
        return self.points[-1]

    def eval(self, u: float) -> Point2:
        """Evaluate at parameter u in [0, 1]."""
        if self.kind == "line":
            a, b = self.points
            return Point2(a.x + (b.x - a.x) * u, a.y + (b.y - a.y) * u)
        a, c, b = self.points
        w0 = (1 - u) * (1 - u)
        w1 = 2 * u * (1 - u)
        w2 = u * u
        return Point2(
            w0 * a.x + w1 * c.x + w2 * b.x,
            w0 * a.y + w1 * c.y + w2 * b.y,
        )

    def derivative(self, u: float) -> tuple:
        if self.kind == "line":
            a, b = self.points
            return (b.x - a.x, b.y - a.y)
        a, c, b = self.points
        dx = 2 * (1 - u) * (c.x - a.x) + 2 * u * (b.x - c.x)
        dy = 2 * (1 - u) * (c.y - a.y) + 2 * u * (b.y - c.y)
        if dx == 0.0 and dy == 0.0:
            # Degenerate tangent (cusp); fall back to the chord.
            return (b.x - a.x, b.y - a.y)
        return (dx, dy)

    def length(self) -> float:
        if self.kind == "line":
            return self.points[0].distance(self.points[1])
        return _quad_length(self)

    def split(self, u: float) -> tuple:
        """de Casteljau split at parameter u, returning two segments."""
        if self.kind == "line":
            m = self.eval(u)
            return (
                CurveSegment("line", (self.points[0], m)),
                CurveSegment("line", (m, self.points[1])),
            )
        a, c, b = self.points
        p01 = Point2(a.x + (c.x - a.x) * u, a.y + (c.y - a.y) * u)
        p12 = Point2(c.x + (b.x - c.x) * u, c.y + (b.y - c.y) * u)
        m = Point2(p01.x + (p12.x - p01.x) * u, p01.y + (p12.y - p01.y) * u)
        return (
            CurveSegment("quadratic", (a, p01, m)),
            CurveSegment("quadratic", (m, p12, b)),
        )


# Dense parameter/arc-length table per quadratic segment; 1024 steps keep the
# chord-sum length error far below the 1e-6 relative target for smooth curves.
_TABLE_STEPS = 1024


@lru_cache(maxsize=65536)
def _seg_table(seg: CurveSegment) -> tuple:
    """(parameters, cumulative arc lengths) sampled densely along a quadratic."""
    a, c, b = (p.as_array() for p in seg.points)
    u = np.linspace(0.0, 1.0, _TABLE_STEPS + 1)
    w = u[:, None]
    pts = (1 - w) ** 2 * a + 2 * w * (1 - w) * c + w**2 * b
    cum = np.concatenate(
        [[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))]
    )
    return u, cum


def _quad_length(seg: CurveSegment) -> float:
    return float(_seg_table(seg)[1][-1])


@dataclass(frozen=True)
class Path:
    """An ordered chain of segments; consecutive segments share endpoints."""

    segments: tuple
    closed: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        for prev, nxt in zip(segs, segs[1:]):
            if prev.end != nxt.start:
                raise ValueError("consecutive segments must share endpoints")
        if self.closed and segs and segs[-1].end != segs[0].start:
            raise ValueError("closed path must end at its start")

    @property
    def start(self) -> Point2:
        return self.segments[0].start

    @property
    def end(self) -> Point2:
        return self.segments[-1].end

    def flatten(self, samples_per_segment: int = 32) -> np.ndarray:
        """Dense polyline approximation, shape (n, 2)."""
        pts = []
        for seg in self.segments:
            n = 1 if seg.kind == "line" else samples_per_segment
            for i in range(n):
                pts.append(seg.eval(i / n))
        if self.segments:
            pts.append(self.segments[-1].end)
        return np.array([[p.x, p.y] for p in pts], dtype=float)


def arc_length(path: Path) -> float:
    return sum(seg.length() for seg in path.segments)


def point_at(path: Path, t: float) -> Point2:
    """Point at arc-length t from the start of the path."""
    total = arc_length(path)
    if t < -1e-9 or t > total + 1e-9:
        raise ValueError(f"arc length {t} out of range [0, {total}]")
    t = min(max(t, 0.0), total)
    if not path.segments:
        raise ValueError("empty path has no points")
    remaining = t
    for seg in path.segments:
        seg_len = seg.length()
        if remaining <= seg_len or seg is path.segments[-1]:
            return _point_on_segment(seg, remaining, seg_len)
        remaining -= seg_len
    return path.end


def tangent_at(path: Path, t: float) -> float:
    """Tangent angle (radians in [0, 2pi)) at arc-length t."""
    total = arc_length(path)
    t = min(max(t, 0.0), total)
    remaining = t
    for seg in path.segments:
        seg_len = seg.length()
        if remaining <= seg_len or seg is path.segments[-1]:
            u = _param_at_length(seg, remaining, seg_len)
            dx, dy = seg.derivative(u)
            return math.atan2(dy, dx) % (2 * math.pi)
        remaining -= seg_len
    raise ValueError("empty path has no tangent")


def _param_at_length(seg: CurveSegment, s: float, seg_len: float) -> float:
    if seg_len <= 0:
        return 0.0
    if seg.kind == "line":
        return min(max(s / seg_len, 0.0), 1.0)
    u, cum = _seg_table(seg)
    s = min(max(s, 0.0), float(cum[-1]))
    return float(np.interp(s, cum, u))


def _point_on_segment(seg: CurveSegment, s: float, seg_len: float) -> Point2:
    return seg.eval(_param_at_length(seg, s, seg_len))


@dataclass(frozen=True)
class Region:
    """A simple polygon. Boundary points count as inside, so boundary
    samples incur zero domain-constraint cost."""

    boundary: tuple  # tuple of Point2

    def __post_init__(self):
        pts = tuple(self.boundary)
        object.__setattr__(self, "boundary", pts)
        if len(pts) < 3:
            raise ValueError("region needs at least 3 boundary points")
        if abs(self._signed_area()) <= 0:
            raise ValueError("region must have positive area")

    def _signed_area(self) -> float:
        pts = self.boundary
        area = 0.0
        for i in range(len(pts)):
            a, b = pts[i], pts[(i + 1) % len(pts)]
            area += a.x * b.y - b.x * a.y
        return area / 2.0

    @property
    def area(self) -> float:
        return abs(self._signed_area())

    def bbox(self) -> tuple:
        xs = [p.x for p in self.boundary]
        ys = [p.y for p in self.boundary]
        return (min(xs), min(ys), max(xs), max(ys))

    @staticmethod
    def from_bbox(x: float, y: float, w: float, h: float) -> "Region":
        if w <= 0 or h <= 0:
            raise ValueError("region bbox must have positive extent")
        return Region(
            (Point2(x, y), Point2(x + w, y), Point2(x + w, y + h), Point2(x, y + h))
        )


def _project_on_segment(ax, ay, bx, by, qx, qy) -> tuple:
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0:
        return ax, ay
    u = ((qx - ax) * dx + (qy - ay) * dy) / denom
    u = min(max(u, 0.0), 1.0)
    return ax + u * dx, ay + u * dy


def distance_to_boundary(region: Region, q: Point2) -> tuple:
    """Unsigned distance to the polygon boundary and the nearest boundary point."""
    best_d2 = math.inf
    best = None
    pts = region.boundary
    for i in range(len(pts)):
        a, b = pts[i], pts[(i + 1) % len(pts)]
        px, py = _project_on_segment(a.x, a.y, b.x, b.y, q.x, q.y)
        d2 = (px - q.x) ** 2 + (py - q.y) ** 2
        if d2 < best_d2:
            best_d2 = d2
            best = (px, py)
    return math.sqrt(best_d2), Point2(best[0], best[1])


def contains(region: Region, q: Point2) -> bool:
    """Even-odd point-in-polygon test; boundary points count as inside."""
    pts = region.boundary
    n = len(pts)
    inside = False
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        # On-edge check first: boundary is inside by convention.
        px, py = _project_on_segment(a.x, a.y, b.x, b.y, q.x, q.y)
        if (px - q.x) ** 2 + (py - q.y) ** 2 <= 1e-18:
            return True
        if (a.y > q.y) != (b.y > q.y):
            x_cross = a.x + (q.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if q.x < x_cross:
                inside = not inside
    return inside
