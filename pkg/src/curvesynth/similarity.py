"""Scalar difference measures: sample position/id/edge-set/orientation
differences and the robust neighborhood similarity built from a MatchMap."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import CONTINUOUS, DISCRETE, PatternGraph, Sample, SynthesisConfig
from .matching import MatchMap

__all__ = [
    "position_diff",
    "id_diff",
    "edge_set_diff",
    "orientation_diff",
    "neighborhood_diff",
    "circular_diff",
]

TWO_PI = 2 * math.pi


def circular_diff(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def position_diff(s: Sample, s2: Sample) -> np.ndarray:
    return np.array(s.position, dtype=float) - np.array(s2.position, dtype=float)


def id_diff(s: Sample, s2: Sample) -> int:
    if s.kind != DISCRETE or s2.kind != DISCRETE:
        raise ValueError("id_diff requires two discrete samples")
    return 0 if s.element_id == s2.element_id else 1


def _edge_offset(graph: PatternGraph, sid: int, eid: int) -> np.ndarray:
    edge = graph.edges[eid]
    other = edge.other(sid)
    return position_diff(graph.samples[sid], graph.samples[other])


def edge_set_diff(
    graph: PatternGraph,
    sid: int,
    graph2: PatternGraph,
    sid2: int,
    edge_match: dict,
    cfg: SynthesisConfig,
    level: int = None,
) -> float:
    """Sum of matched edge-offset deltas plus w_c times the degree mismatch.

    edge_match maps edge ids of sid to edge ids of sid2. A sample with an
    empty edge set (newly added output sample) costs 0."""
    s = graph.samples[sid]
    s2 = graph2.samples[sid2]
    if s.kind != CONTINUOUS or s2.kind != CONTINUOUS:
        raise ValueError("edge_set_diff requires continuous samples")
    if not s.edges:
        return 0.0
    total = 0.0
    for eid, eid2 in edge_match.items():
        delta = _edge_offset(graph, sid, eid) - _edge_offset(graph2, sid2, eid2)
        total += float(np.linalg.norm(delta))
    lvl = graph.level if level is None else level
    w_c = cfg.w_c(min(lvl, cfg.levels - 1))
    return total + w_c * abs(len(s.edges) - len(s2.edges))


def orientation_diff(s: Sample, s2: Sample, orient_match: dict) -> float:
    """Sum of smallest absolute circular differences over matched entries."""
    total = 0.0
    for i, j in orient_match.items():
        total += circular_diff(s.orientations[i], s2.orientations[j])
    return total


def optimal_orientation_match(s: Sample, s2: Sample) -> dict:
    a = np.array(s.orientations, dtype=float)
    b = np.array(s2.orientations, dtype=float)
    if len(a) == 0 or len(b) == 0:
        return {}
    d = np.abs(a[:, None] - b[None, :]) % TWO_PI
    d = np.minimum(d, TWO_PI - d)
    rows, cols = linear_sum_assignment(d)
    return {int(r): int(c) for r, c in zip(rows, cols)}


def neighborhood_diff(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    match: MatchMap,
    out_center: int,
    in_center: int,
    cfg: SynthesisConfig,
) -> float:
    """Robust neighborhood similarity: matched-pair terms in local frames
    plus a constant cost per unmatched output sample. Orientations are
    deliberately excluded."""
    level = min(out_graph.level, cfg.levels - 1)
    kappa = cfg.kappa(level)
    w_a = cfg.attribute_weight
    oc = out_graph.samples[out_center]
    ic = in_graph.samples[in_center]
    total = 0.0
    for osid, isid in match.sample_pairs.items():
        so = out_graph.samples[osid]
        si = in_graph.samples[isid]
        pos_term = np.linalg.norm(position_diff(oc, so) - position_diff(ic, si))
        if so.kind == DISCRETE:
            attr = float(id_diff(so, si))
        else:
            attr = edge_set_diff(
                out_graph, osid, in_graph, isid, match.edge_pairs.get(osid, {}), cfg
            )
        total += float(pos_term) + w_a * attr
    total += kappa * len(match.unmatched_output)
    return total
