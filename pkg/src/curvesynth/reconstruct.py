"""Turn a synthesized pattern graph back into vector curves.

Discrete elements are reconstructed by fitting a least-squares similarity
transform from the template sample layout to the output samples. Continuous
structures are traced by matching each sample's orientation entries to its
incident edges and passing straight through a sample only when the two
traversal edges' entries are almost opposite; traced paths are rendered as
quadratic Bezier splines interpolating the sample positions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .geometry import CurveSegment, Path, Point2
from .graph import CONTINUOUS, DISCRETE, PatternGraph, Sample, SynthesisConfig
from .io import VectorDocument

log = logging.getLogger(__name__)

__all__ = [
    "TracedPath",
    "pair_orientations",
    "trace_paths",
    "fit_curves",
    "count_path_breaks",
    "similarity_fit",
    "reconstruct_discrete",
    "reconstruct",
]

TWO_PI = 2 * math.pi
_DEFAULT_BAND = (8 * math.pi / 9, 10 * math.pi / 9)


@dataclass
class TracedPath:
    samples: list  # ordered SampleId list
    closed: bool = False


def _circ_diff(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def pair_orientations(sample: Sample, band: tuple = _DEFAULT_BAND) -> tuple:
    """Greedily pair orientation entries that are almost opposite.

    Candidate pairs are processed in increasing |difference - pi|; a pair is
    accepted when its absolute circular difference lies strictly inside the
    open band and neither entry is used yet. Returns (pairs, leftovers)."""
    lo, hi = band
    entries = sample.orientations
    n = len(entries)
    cands = []
    for i in range(n):
        for j in range(i + 1, n):
            diff = abs(entries[i] - entries[j]) % TWO_PI
            if lo < diff < hi:
                cands.append((abs(diff - math.pi), i, j))
    cands.sort()
    used = set()
    pairs = []
    for _, i, j in cands:
        if i in used or j in used:
            continue
        used.add(i)
        used.add(j)
        pairs.append((i, j))
    leftovers = [i for i in range(n) if i not in used]
    return pairs, leftovers


def _incident_edge_angles(graph: PatternGraph, sid: int) -> tuple:
    """Sorted incident edge ids and the outgoing angle of each."""
    s = graph.samples[sid]
    eids = sorted(s.edges)
    angles = []
    for eid in eids:
        other = graph.samples[graph.edges[eid].other(sid)]
        dx = other.position[0] - s.position[0]
        dy = other.position[1] - s.position[1]
        angles.append(math.atan2(dy, dx) % TWO_PI)
    return eids, angles


def _partner_map(
    graph: PatternGraph, orientation_aware: bool, band: tuple
) -> dict:
    """(sample id, incoming edge id) -> outgoing edge id for pass-through.

    The map is a per-sample symmetric matching over incident edges: an edge
    continues through a sample only when its paired edge exists."""
    partners = {}
    for sid in sorted(graph.samples):
        s = graph.samples[sid]
        if s.kind != CONTINUOUS:
            continue
        eids, angles = _incident_edge_angles(graph, sid)
        if len(eids) < 2:
            continue
        if orientation_aware:
            if not s.orientations:
                continue
            # match orientation entries to incident edges, then pass through
            # where the two edges' matched entries form an opposite pair
            o = np.array(s.orientations, dtype=float)
            a = np.array(angles, dtype=float)
            d = np.abs(o[:, None] - a[None, :]) % TWO_PI
            d = np.minimum(d, TWO_PI - d)
            rows, cols = linear_sum_assignment(d)
            entry_of_edge = {eids[c]: int(r) for r, c in zip(rows, cols)}
            pairs, _ = pair_orientations(s, band)
            pair_set = {frozenset(p) for p in pairs}
            for x in range(len(eids)):
                for y in range(x + 1, len(eids)):
                    e1, e2 = eids[x], eids[y]
                    if e1 not in entry_of_edge or e2 not in entry_of_edge:
                        continue
                    key = frozenset((entry_of_edge[e1], entry_of_edge[e2]))
                    if len(key) == 2 and key in pair_set:
                        partners[(sid, e1)] = e2
                        partners[(sid, e2)] = e1
        else:
            # blind mode: pair edges whose own angles are almost opposite
            lo, _hi = band
            cands = []
            for x in range(len(eids)):
                for y in range(x + 1, len(eids)):
                    diff = _circ_diff(angles[x], angles[y])
                    # diff is folded to [0, pi]; the open band folds to (lo, pi]
                    if diff > lo:
                        cands.append((abs(diff - math.pi), x, y))
            cands.sort()
            used = set()
            for _, x, y in cands:
                if x in used or y in used:
                    continue
                used.add(x)
                used.add(y)
                partners[(sid, eids[x])] = eids[y]
                partners[(sid, eids[y])] = eids[x]
    return partners


def trace_paths(
    graph: PatternGraph,
    orientation_aware: bool = True,
    band: tuple = _DEFAULT_BAND,
) -> list:
    """Partition the graph's edges into traced paths.

    Every edge belongs to exactly one traced path; a path continues through a
    sample only where the partner map joins its two traversal edges."""
    partners = _partner_map(graph, orientation_aware, band)
    used = set()
    paths = []
    for start_eid in sorted(graph.edges):
        if start_eid in used:
            continue
        edge = graph.edges[start_eid]
        used.add(start_eid)
        seq = [edge.a, edge.b]
        closed = False
        # forward from edge.b
        cur_sid, cur_eid = edge.b, start_eid
        while True:
            nxt = partners.get((cur_sid, cur_eid))
            if nxt is None or nxt in used:
                break
            used.add(nxt)
            cur_sid = graph.edges[nxt].other(cur_sid)
            seq.append(cur_sid)
            cur_eid = nxt
            if cur_sid == seq[0]:
                closed = True
                seq.pop()  # drop the duplicated start
                break
        if not closed:
            # backward from edge.a
            cur_sid, cur_eid = edge.a, start_eid
            while True:
                nxt = partners.get((cur_sid, cur_eid))
                if nxt is None or nxt in used:
                    break
                used.add(nxt)
                cur_sid = graph.edges[nxt].other(cur_sid)
                seq.insert(0, cur_sid)
                cur_eid = nxt
        paths.append(TracedPath(samples=seq, closed=closed))
    return paths


def count_path_breaks(
    graph: PatternGraph,
    orientation_aware: bool = True,
    band: tuple = _DEFAULT_BAND,
) -> int:
    """Number of degree-2 continuous samples whose two edges do not join."""
    partners = _partner_map(graph, orientation_aware, band)
    breaks = 0
    for sid in sorted(graph.samples):
        s = graph.samples[sid]
        if s.kind != CONTINUOUS or len(s.edges) != 2:
            continue
        e1, e2 = sorted(s.edges)
        if partners.get((sid, e1)) != e2:
            breaks += 1
    return breaks


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.hypot(v[0], v[1])
    return v / n if n > 1e-15 else v


def _span_segment(p0, p1, u0, u1) -> CurveSegment:
    """Quadratic span from p0 to p1 with outgoing/incoming unit tangents.

    The control point is the intersection of the two tangent lines; collinear
    or badly conditioned configurations degrade to a straight line."""
    chord = p1 - p0
    clen = float(np.hypot(*chord))
    a = Point2(float(p0[0]), float(p0[1]))
    b = Point2(float(p1[0]), float(p1[1]))
    if clen <= 1e-15:
        return CurveSegment("line", (a, b))
    det = u0[0] * u1[1] - u0[1] * u1[0]
    if abs(det) < 1e-9:
        # parallel tangents: a line if they run along the chord, otherwise an
        # S-shaped span the caller must split
        if abs(u0[0] * chord[1] - u0[1] * chord[0]) <= 1e-6 * clen:
            return CurveSegment("line", (a, b))
        return None
    # solve p0 + t*u0 = p1 - s*u1 for (t, s) by Cramer's rule
    t = (chord[0] * u1[1] - chord[1] * u1[0]) / det
    s = (u0[0] * chord[1] - u0[1] * chord[0]) / det
    if t <= 1e-12 or s <= 1e-12 or t > 4 * clen or s > 4 * clen:
        return None
    c = p0 + t * np.asarray(u0)
    # collinear guard: control on the chord means a straight line
    cross = chord[0] * (c[1] - p0[1]) - chord[1] * (c[0] - p0[0])
    if abs(cross) <= 1e-9 * clen:
        return CurveSegment("line", (a, b))
    return CurveSegment("quadratic", (a, Point2(float(c[0]), float(c[1])), b))


def _span_segments(p0, p1, u0, u1) -> list:
    """Quadratic span(s) interpolating the endpoints with the given tangents.

    An S-shaped span (tangent-line intersection behind an endpoint) cannot be
    a single quadratic; it is split at the chord midpoint with the chord
    direction as the shared tangent, preserving tangent continuity."""
    seg = _span_segment(p0, p1, u0, u1)
    if seg is not None:
        return [seg]
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    chord = p1 - p0
    clen = float(np.hypot(*chord))
    a = Point2(float(p0[0]), float(p0[1]))
    b = Point2(float(p1[0]), float(p1[1]))
    if clen <= 1e-15:
        return [CurveSegment("line", (a, b))]
    # Take the midpoint and mid-tangent of the cubic Hermite interpolant and
    # fit a tangent-intersection quadratic to each half.
    c1 = p0 + np.asarray(u0, dtype=float) * (clen / 3.0)
    c2 = p1 - np.asarray(u1, dtype=float) * (clen / 3.0)
    m = (p0 + 3.0 * c1 + 3.0 * c2 + p1) / 8.0
    um_vec = (p1 + c2) - (p0 + c1)
    if float(np.hypot(*um_vec)) <= 1e-12:
        return [CurveSegment("line", (a, b))]
    um = _unit(um_vec)
    first = _span_segment(p0, m, u0, um)
    second = _span_segment(m, p1, um, u1)
    if first is None or second is None:
        return [CurveSegment("line", (a, b))]
    return [first, second]


def fit_curves(paths: list, graph: PatternGraph) -> VectorDocument:
    """Render traced paths as interpolating quadratic splines."""
    doc = VectorDocument()
    for tp in paths:
        pts = [np.array(graph.samples[sid].position) for sid in tp.samples]
        # drop consecutive duplicates
        dedup = [pts[0]]
        for p in pts[1:]:
            if np.hypot(*(p - dedup[-1])) > 1e-12:
                dedup.append(p)
        pts = dedup
        if len(pts) < 2:
            continue
        n = len(pts)
        tangents = []
        for i in range(n):
            if tp.closed:
                prev_p = pts[(i - 1) % n]
                next_p = pts[(i + 1) % n]
                tangents.append(_unit(next_p - prev_p))
            elif i == 0:
                if n >= 3:
                    # one-sided parabolic end tangent
                    tangents.append(_unit(2.0 * (pts[1] - pts[0]) - (pts[2] - pts[1])))
                else:
                    tangents.append(_unit(pts[1] - pts[0]))
            elif i == n - 1:
                if n >= 3:
                    tangents.append(
                        _unit(2.0 * (pts[-1] - pts[-2]) - (pts[-2] - pts[-3]))
                    )
                else:
                    tangents.append(_unit(pts[-1] - pts[-2]))
            else:
                tangents.append(_unit(pts[i + 1] - pts[i - 1]))
        segments = []
        spans = n if tp.closed else n - 1
        for i in range(spans):
            j = (i + 1) % n
            segments.extend(_span_segments(pts[i], pts[j], tangents[i], tangents[j]))
        # enforce exact endpoint sharing between consecutive segments
        fixed = []
        for i, seg in enumerate(segments):
            if i and seg.start != fixed[-1].end:
                pts_seg = (fixed[-1].end,) + seg.points[1:]
                seg = CurveSegment(seg.kind, pts_seg)
            fixed.append(seg)
        if tp.closed and fixed and fixed[-1].end != fixed[0].start:
            last = fixed[-1]
            fixed[-1] = CurveSegment(last.kind, last.points[:-1] + (fixed[0].start,))
        doc.paths.append(Path(tuple(fixed), closed=tp.closed))
    return doc


def similarity_fit(src: np.ndarray, dst: np.ndarray) -> tuple:
    """Least-squares similarity (rotation, uniform scale, translation) mapping
    src points onto dst points. Returns (scale, rotation 2x2, translation).

    With fewer than 2 points the fit is translation-only."""
    src = np.asarray(src, dtype=float).reshape(-1, 2)
    dst = np.asarray(dst, dtype=float).reshape(-1, 2)
    if len(src) != len(dst):
        raise ValueError("point sets must have equal size")
    if len(src) < 2:
        t = (dst.mean(axis=0) - src.mean(axis=0)) if len(src) else np.zeros(2)
        return 1.0, np.eye(2), t
    mu_s = src.mean(axis=0)
    mu_d = dst.mean(axis=0)
    a = src - mu_s
    b = dst - mu_d
    # complex-number formulation of the 2D similarity Procrustes problem
    za = a[:, 0] + 1j * a[:, 1]
    zb = b[:, 0] + 1j * b[:, 1]
    denom = float(np.sum(np.abs(za) ** 2))
    if denom <= 1e-18:
        return 1.0, np.eye(2), mu_d - mu_s
    w = np.sum(np.conj(za) * zb) / denom
    scale = float(abs(w))
    if scale <= 1e-12:
        return 1.0, np.eye(2), mu_d - mu_s
    cos_t = float(w.real / scale)
    sin_t = float(w.imag / scale)
    rot = np.array([[cos_t, -sin_t], [sin_t, cos_t]])
    t = mu_d - scale * (rot @ mu_s)
    return scale, rot, t


def _transform_path(path: Path, scale: float, rot: np.ndarray, t: np.ndarray) -> Path:
    def tx(p: Point2) -> Point2:
        v = scale * (rot @ np.array([p.x, p.y])) + t
        return Point2(float(v[0]), float(v[1]))

    segs = [
        CurveSegment(seg.kind, tuple(tx(p) for p in seg.points))
        for seg in path.segments
    ]
    return Path(tuple(segs), closed=path.closed)


def reconstruct_discrete(
    out_positions: dict,
    template_layout: dict,
    template_outline: Path,
) -> Path:
    """Outline of one output element instance.

    out_positions and template_layout map element_id -> (x, y); the fitted
    similarity transform of their common ids is applied to the outline."""
    common = sorted(set(out_positions) & set(template_layout))
    src = np.array([template_layout[k] for k in common], dtype=float).reshape(-1, 2)
    dst = np.array([out_positions[k] for k in common], dtype=float).reshape(-1, 2)
    scale, rot, t = similarity_fit(src, dst)
    return _transform_path(template_outline, scale, rot, t)


class DiscreteTemplates:
    """Per-level template layouts of every discrete element group.

    element_id -> (group index, layout position) per level, plus the group's
    template outline; built from the first instance of each group."""

    def __init__(self, doc: VectorDocument, cfg: SynthesisConfig):
        from .sampler import sample_discrete

        self.outlines = [g.template for g in doc.element_groups]
        self.layouts = [dict() for _ in range(cfg.levels)]  # eid -> (group, pos)
        if not doc.element_groups:
            return
        template_doc = VectorDocument(
            paths=[],
            element_groups=[
                type(g)(template=g.template, instances=[g.template])
                for g in doc.element_groups
            ],
        )
        per_level = sample_discrete(
            template_doc, cfg.levels, cfg.sampling_distances[-1]
        )
        for lvl in range(cfg.levels):
            for sample, _ring in per_level[lvl]:
                group = sample.element_instance  # one instance per group here
                self.layouts[lvl][sample.element_id] = (group, sample.position)

    def group_of(self, level: int, element_id: int):
        entry = self.layouts[level].get(element_id)
        return None if entry is None else entry[0]

    def layout_of_group(self, level: int, group: int) -> dict:
        return {
            eid: pos
            for eid, (g, pos) in self.layouts[level].items()
            if g == group
        }


def reconstruct(
    graph: PatternGraph,
    cfg: SynthesisConfig = None,
    templates: DiscreteTemplates = None,
) -> VectorDocument:
    """Full reconstruction: traced continuous curves plus element outlines."""
    cfg = cfg or SynthesisConfig()
    band = cfg.opposite_pair_band
    doc = fit_curves(trace_paths(graph, orientation_aware=True, band=band), graph)
    if templates is not None and templates.outlines:
        level = min(graph.level, cfg.levels - 1)
        instances = {}
        for sid in sorted(graph.samples):
            s = graph.samples[sid]
            if s.kind != DISCRETE:
                continue
            instances.setdefault(s.element_instance, {})[s.element_id] = s.position
        by_group = {}
        for inst, positions in sorted(instances.items()):
            group = templates.group_of(level, next(iter(sorted(positions))))
            if group is None:
                log.warning("discrete instance %s has unknown element ids", inst)
                continue
            outline = reconstruct_discrete(
                positions,
                templates.layout_of_group(level, group),
                templates.outlines[group],
            )
            by_group.setdefault(group, []).append(outline)
        from .io import ElementGroup

        for group in sorted(by_group):
            doc.element_groups.append(
                ElementGroup(
                    template=templates.outlines[group],
                    instances=by_group[group],
                )
            )
    return doc
