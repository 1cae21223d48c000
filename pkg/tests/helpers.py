"""Shared test utilities: dense curve sampling, Hausdorff distance,
junction counting, and small graph builders."""

import math

import numpy as np
from scipy.spatial import cKDTree

from curvesynth.graph import CONTINUOUS, PatternGraph, Sample

TWO_PI = 2 * math.pi


def dense_points(doc, per_segment: int = 64) -> np.ndarray:
    """Evenly sample every segment of every path (lines included)."""
    pts = []
    for path in doc.paths:
        for seg in path.segments:
            for u in np.linspace(0.0, 1.0, per_segment):
                p = seg.eval(float(u))
                pts.append((p.x, p.y))
    return np.array(pts, dtype=float).reshape(-1, 2)


def one_sided_hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """max over a of the distance to the nearest point of b."""
    d, _ = cKDTree(b).query(a)
    return float(np.max(d))


def junction_count(graph: PatternGraph) -> int:
    return sum(
        1
        for s in graph.samples.values()
        if s.kind == CONTINUOUS and len(s.edges) >= 3
    )


def chain_graph(points, d: float = 25.0, level: int = 0) -> PatternGraph:
    """Open polyline graph: consecutive points connected, tangent orientations."""
    g = PatternGraph(level=level, sampling_distance=d)
    pts = [np.asarray(p, dtype=float) for p in points]
    sids = []
    for i, p in enumerate(pts):
        angles = []
        if i > 0:
            v = pts[i - 1] - p
            angles.append(math.atan2(v[1], v[0]) % TWO_PI)
        if i < len(pts) - 1:
            v = pts[i + 1] - p
            angles.append(math.atan2(v[1], v[0]) % TWO_PI)
        sids.append(
            g.add_sample(Sample(position=(p[0], p[1]), orientations=angles))
        )
    for a, b in zip(sids, sids[1:]):
        g.add_edge(a, b)
    return g


def grid_graph(nx: int, ny: int, d: float = 25.0, level: int = 0) -> PatternGraph:
    """Regular axis-aligned grid of samples, 4-connected, with orientations."""
    g = PatternGraph(level=level, sampling_distance=d)
    sid = {}
    for j in range(ny):
        for i in range(nx):
            angles = []
            if i > 0:
                angles.append(math.pi)
            if i < nx - 1:
                angles.append(0.0)
            if j > 0:
                angles.append(1.5 * math.pi)
            if j < ny - 1:
                angles.append(0.5 * math.pi)
            sid[(i, j)] = g.add_sample(
                Sample(position=(i * d, j * d), orientations=angles)
            )
    for j in range(ny):
        for i in range(nx):
            if i + 1 < nx:
                g.add_edge(sid[(i, j)], sid[(i + 1, j)])
            if j + 1 < ny:
                g.add_edge(sid[(i, j)], sid[(i, j + 1)])
    return g
