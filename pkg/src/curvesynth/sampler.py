"""Convert a vector document into hierarchical pattern graphs.

Continuous paths get one sample at every intersection, corner, and open end,
plus uniformly spaced interior samples; discrete elements get a
centroid / midpoint-ring / boundary-ring layout across hierarchy levels.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import Path, Point2, arc_length, point_at, tangent_at
from .graph import CONTINUOUS, DISCRETE, PatternGraph, Sample, SynthesisConfig
from .io import VectorDocument

log = logging.getLogger(__name__)

__all__ = ["Hierarchy", "sample_continuous", "sample_discrete", "build_hierarchy"]

TWO_PI = 2 * math.pi
# Tangent discontinuity above this angle (radians) makes a path vertex a corner.
# Tangent-angle discontinuity (radians) above which a path vertex counts as a
# corner. Interpolating spline joints are tangent-continuous only up to fit
# error, so the threshold must tolerate a few degrees of numerical drift.
_CORNER_EPS = 0.15


@dataclass
class Hierarchy:
    levels: list = field(default_factory=list)  # PatternGraph, coarse -> fine
    # parents[l] maps a discrete sample id at level l to its parent at level l-1
    parents: list = field(default_factory=list)


def _flatten_path(path: Path, tol: float) -> tuple:
    """Flatten to a polyline; returns (points (n,2), cumulative arc lengths (n,))."""
    pts = [np.array([path.start.x, path.start.y])]
    for seg in path.segments:
        if seg.kind == "line":
            pts.append(np.array([seg.end.x, seg.end.y]))
        else:
            stack = [seg]
            out = []
            while stack:
                s = stack.pop()
                chord = s.start.distance(s.end)
                poly = s.start.distance(s.points[1]) + s.points[1].distance(s.end)
                if poly - chord <= tol:
                    out.append(s)
                else:
                    left, right = s.split(0.5)
                    stack.append(right)
                    stack.append(left)
            for s in out:
                pts.append(np.array([s.end.x, s.end.y]))
    pts = np.array(pts)
    lens = np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(pts, axis=0), axis=1))])
    return pts, lens


def _segment_intersections(p1, q1, p2, q2):
    """Intersections of segments [p1,q1] and [p2,q2] incl. endpoint touching."""
    r = q1 - p1
    s = q2 - p2
    denom = r[0] * s[1] - r[1] * s[0]
    qp = p2 - p1
    eps = 1e-12
    if abs(denom) < eps:
        return []
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    if -1e-9 <= t <= 1 + 1e-9 and -1e-9 <= u <= 1 + 1e-9:
        return [(min(max(t, 0.0), 1.0), min(max(u, 0.0), 1.0))]
    return []


def _polyline_intersections(pts_i: np.ndarray, pts_j: np.ndarray, same: bool, closed_i: bool):
    """All (a, t, b, u) hits between piece a of polyline i and piece b of j.

    Vectorized over every piece pair; for a polyline against itself, adjacent
    pieces (shared endpoints, including the closed seam) are skipped."""
    a0 = pts_i[:-1]
    r = pts_i[1:] - a0
    b0 = pts_j[:-1]
    s = pts_j[1:] - b0
    na, nb = len(a0), len(b0)
    if na == 0 or nb == 0:
        return []
    denom = r[:, None, 0] * s[None, :, 1] - r[:, None, 1] * s[None, :, 0]
    qp = b0[None, :, :] - a0[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[..., 0] * s[None, :, 1] - qp[..., 1] * s[None, :, 0]) / denom
        u = (qp[..., 0] * r[:, None, 1] - qp[..., 1] * r[:, None, 0]) / denom
    ok = (
        (np.abs(denom) >= 1e-12)
        & (t >= -1e-9)
        & (t <= 1 + 1e-9)
        & (u >= -1e-9)
        & (u <= 1 + 1e-9)
    )
    if same:
        ai, bi = np.indices(ok.shape)
        ok &= bi >= ai + 2
        if closed_i:
            ok &= ~((ai == 0) & (bi == na - 1))
    hits = []
    for a, b in zip(*np.nonzero(ok)):
        hits.append(
            (
                int(a),
                float(min(max(t[a, b], 0.0), 1.0)),
                int(b),
                float(min(max(u[a, b], 0.0), 1.0)),
            )
        )
    return hits


def _corner_breakpoints(path: Path) -> list:
    """Arc lengths of path vertices with a tangent discontinuity."""
    out = []
    t = 0.0
    segs = path.segments
    for i, seg in enumerate(segs):
        t += seg.length()
        if i == len(segs) - 1 and not path.closed:
            break
        nxt = segs[(i + 1) % len(segs)]
        dx1, dy1 = seg.derivative(1.0)
        dx2, dy2 = nxt.derivative(0.0)
        a1 = math.atan2(dy1, dx1)
        a2 = math.atan2(dy2, dx2)
        diff = abs((a1 - a2 + math.pi) % TWO_PI - math.pi)
        if diff > _CORNER_EPS:
            if i == len(segs) - 1:
                out.append(0.0)  # closed-path seam corner sits at the start
            else:
                out.append(t)
    return out


def _path_intersections(paths: list, tol: float) -> list:
    """Per-path sorted arc lengths of intersection points.

    Returns (break_positions, merged_points): break_positions[i] is a list of
    (arclen, point_key) for path i; point_key identifies coincident points
    across paths so junctions share one sample."""
    flat = [_flatten_path(p, tol) for p in paths]
    events = [[] for _ in paths]
    merge = _PointMerger(max(tol, 1e-9))
    # Polyline lengths underestimate the true arc length, so rescale event
    # positions to the exact metric; otherwise an intersection at a path
    # endpoint misses the endpoint breakpoint's snap tolerance.
    scale = [
        arc_length(p) / lens[-1] if lens[-1] > 0 else 1.0
        for p, (_, lens) in zip(paths, flat)
    ]

    for i in range(len(paths)):
        pts_i, lens_i = flat[i]
        for j in range(i, len(paths)):
            pts_j, lens_j = flat[j]
            hits = _polyline_intersections(
                pts_i, pts_j, same=(i == j), closed_i=paths[i].closed
            )
            for a, t, b, u in hits:
                point = pts_i[a] + t * (pts_i[a + 1] - pts_i[a])
                key = merge.key(point)
                la = (lens_i[a] + t * (lens_i[a + 1] - lens_i[a])) * scale[i]
                lb = (lens_j[b] + u * (lens_j[b + 1] - lens_j[b])) * scale[j]
                events[i].append((la, key))
                events[j].append((lb, key))
    return events, merge


class _PointMerger:
    def __init__(self, tol: float):
        self.tol = tol
        self.points = []

    def key(self, point) -> int:
        for idx, p in enumerate(self.points):
            if np.hypot(p[0] - point[0], p[1] - point[1]) <= self.tol:
                return idx
        self.points.append(np.asarray(point, dtype=float))
        return len(self.points) - 1


def sample_continuous(doc: VectorDocument, d: float, level: int = 0) -> PatternGraph:
    """Sample the continuous paths of a document with spacing <= d."""
    if d <= 0:
        raise ValueError("sampling distance must be positive")
    graph = PatternGraph(level=level, sampling_distance=d)
    paths = [p for p in doc.paths if p.segments]
    usable = []
    for p in paths:
        if arc_length(p) <= 1e-9:
            log.warning("skipping degenerate zero-length path")
            continue
        usable.append(p)
    if not usable:
        return graph

    events, merger = _path_intersections(usable, tol=1e-3 * d)
    junction_sample: dict = {}  # merged point key -> sample id
    endpoint_sample: dict = {}  # rounded endpoint -> sample id, joins touching paths

    def endpoint_key(pt: Point2):
        return (round(pt.x / (1e-3 * d)), round(pt.y / (1e-3 * d)))

    for pi, path in enumerate(usable):
        total = arc_length(path)
        # breakpoints: ends (open paths), intersections, corners
        breaks = {}
        if not path.closed:
            breaks[0.0] = None
            breaks[total] = None
        for la, key in events[pi]:
            la = min(max(la, 0.0), total)
            # snap to an existing breakpoint if within tolerance
            snapped = None
            for existing in breaks:
                if abs(existing - la) <= 1e-3 * d:
                    snapped = existing
                    break
            if snapped is None:
                breaks[la] = key
            elif breaks[snapped] is None:
                breaks[snapped] = key
        for lc in _corner_breakpoints(path):
            lc = min(max(lc, 0.0), total)
            if not any(abs(e - lc) <= 1e-3 * d for e in breaks):
                breaks[lc] = None

        positions = sorted(breaks)
        if not positions:
            # smooth closed loop with no breakpoints: uniform ring
            n = max(int(math.ceil(total / d)), 3)
            sids = []
            for i in range(n):
                t = i * total / n
                pt = point_at(path, t)
                theta = tangent_at(path, t)
                sids.append(
                    graph.add_sample(
                        Sample(
                            position=(pt.x, pt.y),
                            orientations=[theta, (theta + math.pi) % TWO_PI],
                        )
                    )
                )
            for i in range(n):
                graph.add_edge(sids[i], sids[(i + 1) % n])
            continue

        # spans between consecutive breakpoints (wrap for closed paths)
        spans = []
        if path.closed:
            for i in range(len(positions)):
                t0 = positions[i]
                t1 = positions[(i + 1) % len(positions)]
                if i == len(positions) - 1:
                    t1 += total
                spans.append((t0, t1))
        else:
            spans = list(zip(positions, positions[1:]))

        def breakpoint_sample_id(t: float) -> int:
            t_mod = t % total if path.closed else t
            key = breaks.get(t_mod)
            if key is None:
                for existing, k in breaks.items():
                    if abs(existing - t_mod) <= 1e-9:
                        key = k
                        break
            pt = point_at(path, t_mod)
            if key is not None and key in junction_sample:
                return junction_sample[key]
            ekey = endpoint_key(pt)
            if key is None and ekey in endpoint_sample:
                return endpoint_sample[ekey]
            sid = graph.add_sample(Sample(position=(pt.x, pt.y), orientations=[]))
            if key is not None:
                junction_sample[key] = sid
                endpoint_sample[ekey] = sid
            else:
                endpoint_sample[ekey] = sid
            return sid

        for t0, t1 in spans:
            span_len = t1 - t0
            if span_len <= 1e-9:
                continue
            s0 = breakpoint_sample_id(t0)
            s1 = breakpoint_sample_id(t1)
            nspans = max(int(math.ceil(span_len / d)), 1)
            prev = s0
            prev_t = t0
            chain = [s0]
            for i in range(1, nspans):
                t = t0 + i * span_len / nspans
                t_mod = t % total if path.closed else t
                pt = point_at(path, t_mod)
                theta = tangent_at(path, t_mod)
                sid = graph.add_sample(
                    Sample(
                        position=(pt.x, pt.y),
                        orientations=[theta, (theta + math.pi) % TWO_PI],
                    )
                )
                chain.append(sid)
            chain.append(s1)
            for a, b in zip(chain, chain[1:]):
                if a != b:
                    graph.add_edge(a, b)
            # breakpoint orientation entries: outgoing tangents of this span,
            # evaluated just inside the span so a corner vertex picks up the
            # correct side's tangent
            eps = min(1e-6 * total, 0.25 * span_len)
            t0_in = (t0 + eps) % total if path.closed else t0 + eps
            t1_in = (t1 - eps) % total if path.closed else t1 - eps
            graph.samples[s0].orientations.append(tangent_at(path, t0_in))
            graph.samples[s1].orientations.append(
                (tangent_at(path, t1_in) + math.pi) % TWO_PI
            )
    return graph


def _polygon_centroid(points: np.ndarray) -> np.ndarray:
    x, y = points[:, 0], points[:, 1]
    x1, y1 = np.roll(x, -1), np.roll(y, -1)
    cross = x * y1 - x1 * y
    area = cross.sum() / 2.0
    if abs(area) < 1e-12:
        return points.mean(axis=0)
    cx = ((x + x1) * cross).sum() / (6 * area)
    cy = ((y + y1) * cross).sum() / (6 * area)
    return np.array([cx, cy])


def _outline_ring(outline: Path, count: int) -> np.ndarray:
    total = arc_length(outline)
    pts = [point_at(outline, i * total / count) for i in range(count)]
    return np.array([[p.x, p.y] for p in pts])


def sample_discrete(doc: VectorDocument, levels: int, d_finest: float) -> list:
    """Per-level discrete samples for every element instance.

    Returns a list of length `levels`; each entry is a list of
    (Sample, ring_index_or_None) in a deterministic order. Level 0 is the
    centroid, the last level the boundary ring, the middle level (3-level
    hierarchies) midpoints between every second ring sample and the centroid.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    per_level = [[] for _ in range(levels)]
    id_base = [0] * levels
    instance_counter = 0
    for group in doc.element_groups:
        if not group.template.closed:
            raise ValueError("element outlines must be closed")
        ring_count = max(int(math.ceil(arc_length(group.template) / d_finest)), 3)
        mid_idx = list(range(0, ring_count, 2))  # keep every second ring sample
        counts = _level_counts(levels, ring_count, len(mid_idx))
        for inst in group.instances:
            if not inst.closed:
                raise ValueError("element outlines must be closed")
            ring = _outline_ring(inst, ring_count)
            centroid = _polygon_centroid(ring)
            for lvl in range(levels):
                if lvl == 0:
                    layout = [(centroid, None)]
                elif lvl == levels - 1:
                    layout = [(ring[i], i) for i in range(ring_count)]
                else:
                    layout = [((ring[i] + centroid) / 2.0, i) for i in mid_idx]
                for local_id, (pos, ring_i) in enumerate(layout):
                    per_level[lvl].append(
                        (
                            Sample(
                                position=(float(pos[0]), float(pos[1])),
                                kind=DISCRETE,
                                element_id=id_base[lvl] + local_id,
                                element_instance=instance_counter,
                            ),
                            ring_i,
                        )
                    )
            instance_counter += 1
        for lvl in range(levels):
            id_base[lvl] += counts[lvl]
    return per_level


def _level_counts(levels: int, ring_count: int, mid_count: int) -> list:
    counts = [1] * levels
    if levels >= 2:
        counts[-1] = ring_count
    if levels >= 3:
        for lvl in range(1, levels - 1):
            counts[lvl] = mid_count
    return counts


def build_hierarchy(doc: VectorDocument, cfg: SynthesisConfig) -> Hierarchy:
    if doc.is_empty():
        raise ValueError("empty exemplar")
    hier = Hierarchy()
    discrete_levels = sample_discrete(doc, cfg.levels, cfg.sampling_distances[-1]) if doc.element_groups else [[] for _ in range(cfg.levels)]
    added_ids = []  # per level: list of (sample id, ring index, element_instance)
    for lvl in range(cfg.levels):
        graph = sample_continuous(doc, cfg.sampling_distances[lvl], level=lvl)
        ids = []
        for sample, ring_i in discrete_levels[lvl]:
            sid = graph.add_sample(sample)
            ids.append((sid, ring_i, sample.element_instance))
        added_ids.append(ids)
        hier.levels.append(graph)
    # parent links (discrete elements only): ring sample -> midpoint sample of
    # the same ring index (or nearest kept index), midpoint -> centroid
    hier.parents = [dict() for _ in range(cfg.levels)]
    for lvl in range(1, cfg.levels):
        coarse = {}
        for sid, ring_i, inst in added_ids[lvl - 1]:
            coarse.setdefault(inst, []).append((sid, ring_i))
        for sid, ring_i, inst in added_ids[lvl]:
            options = coarse.get(inst, [])
            if not options:
                continue
            if len(options) == 1 or ring_i is None:
                hier.parents[lvl][sid] = options[0][0]
            else:
                # nearest ring index among the coarse level's kept indices
                best = min(
                    options,
                    key=lambda o: abs((o[1] if o[1] is not None else 0) - ring_i),
                )
                hier.parents[lvl][sid] = best[0]
    return hier
