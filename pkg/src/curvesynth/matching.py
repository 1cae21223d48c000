"""Combinatorial correspondence between neighborhoods.

The Hungarian assignment is delegated to scipy's linear_sum_assignment.
match_neighborhoods implements the greedy BFS matcher: centers first, then
waves of junction/end samples reachable from the most recently matched pair,
finally one assignment over all remaining samples; output samples left over
go to unmatched_output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree

from .graph import CONTINUOUS, DISCRETE, PatternGraph, SynthesisConfig

__all__ = ["MatchMap", "hungarian", "match_neighborhoods", "GraphContext", "MatchParams"]

# Cost used to forbid incompatible pairs; pairs assigned at >= _FORBIDDEN / 2
# are treated as unmatched.
_FORBIDDEN = 1e12
TWO_PI = 2 * math.pi


def hungarian(costs) -> tuple:
    """Minimum-cost injective assignment covering min(rows, cols) pairs."""
    costs = np.asarray(costs, dtype=float)
    if costs.size == 0:
        return [], 0.0
    if not np.all(np.isfinite(costs)):
        raise ValueError("cost matrix entries must be finite")
    rows, cols = linear_sum_assignment(costs)
    pairs = sorted(zip(rows.tolist(), cols.tolist()))
    total = float(costs[rows, cols].sum())
    return pairs, total


@dataclass
class MatchMap:
    out_center: int
    in_center: int
    sample_pairs: dict = field(default_factory=dict)  # out sid -> in sid (excl centers)
    unmatched_output: set = field(default_factory=set)
    edge_pairs: dict = field(default_factory=dict)  # out sid -> {out eid -> in eid}
    orientation_pairs: dict = field(default_factory=dict)  # out sid -> {out i -> in i}

    def all_pairs(self) -> list:
        """Matched pairs including the center pair."""
        pairs = [(self.out_center, self.in_center)]
        pairs.extend(sorted(self.sample_pairs.items()))
        return pairs


class GraphContext:
    """Precomputed arrays over a frozen PatternGraph used by matching/search."""

    def __init__(self, graph: PatternGraph):
        self.graph = graph
        self.ids = np.array(sorted(graph.samples), dtype=int)
        self.index = {int(s): i for i, s in enumerate(self.ids)}
        n = len(self.ids)
        self.pos = np.zeros((n, 2))
        self.discrete = np.zeros(n, dtype=bool)
        self.element_id = np.full(n, -1, dtype=int)
        self.degree = np.zeros(n, dtype=int)
        self.no_edges = np.zeros(n, dtype=bool)
        self.edge_offsets = [None] * n  # (deg, 2) arrays, neighbor - sample
        self.edge_ids = [None] * n
        self.orients = [None] * n
        self.adjacency = [None] * n  # graph-edge neighbor indices
        for i, sid in enumerate(self.ids):
            s = graph.samples[int(sid)]
            self.pos[i] = s.position
            self.discrete[i] = s.kind == DISCRETE
            self.element_id[i] = s.element_id
            eids = sorted(s.edges)
            self.degree[i] = len(eids)
            self.no_edges[i] = not eids
            others = [graph.edges[e].other(int(sid)) for e in eids]
            self.edge_ids[i] = eids
            self.adjacency[i] = [self.index[o] for o in others]
            if others:
                self.edge_offsets[i] = (
                    np.array([graph.samples[o].position for o in others]) - self.pos[i]
                )
            else:
                self.edge_offsets[i] = np.zeros((0, 2))
            self.orients[i] = np.array(s.orientations, dtype=float)
        self.tree = cKDTree(self.pos) if n else None
        self._nbr_cache = {}
        self._nbr_radius = None
        # attribute distances against a fixed opposite context; both contexts
        # are frozen snapshots, so entries stay valid for their lifetime
        self._attr_cache = {}

    def neighborhood_idx(self, center: int, radius: float) -> np.ndarray:
        """Indices (not ids) within radius of the center index, center excluded."""
        if self._nbr_radius != radius:
            self._nbr_cache = {}
            self._nbr_radius = radius
        cached = self._nbr_cache.get(center)
        if cached is not None:
            return cached
        idx = self.tree.query_ball_point(self.pos[center], radius)
        idx = np.array(sorted(i for i in idx if i != center), dtype=int)
        self._nbr_cache[center] = idx
        return idx


@dataclass(frozen=True)
class MatchParams:
    w_a: float
    w_c: float
    kappa: float

    @staticmethod
    def from_config(cfg: SynthesisConfig, level: int) -> "MatchParams":
        return MatchParams(
            w_a=cfg.attribute_weight, w_c=cfg.w_c(level), kappa=cfg.kappa(level)
        )


def _min_edge_assignment(off_a: np.ndarray, off_b: np.ndarray) -> float:
    """Min-cost matching of edge offset vectors (sum of Euclidean deltas)."""
    na, nb = len(off_a), len(off_b)
    if na == 0 or nb == 0:
        return 0.0
    d = np.linalg.norm(off_a[:, None, :] - off_b[None, :, :], axis=-1)
    if na == 1 or nb == 1:
        return float(d.min())
    if na == 2 and nb == 2:
        return float(min(d[0, 0] + d[1, 1], d[0, 1] + d[1, 0]))
    rows, cols = linear_sum_assignment(d)
    return float(d[rows, cols].sum())


def _attr_diff(octx: GraphContext, ictx: GraphContext, oi: int, ii: int, params: MatchParams) -> float:
    """Attribute difference between output sample oi and input sample ii."""
    per_input = octx._attr_cache.get(ictx)
    if per_input is None:
        per_input = octx._attr_cache.setdefault(ictx, {})
    key = (oi, ii, params.w_c)
    cached = per_input.get(key)
    if cached is not None:
        return cached
    if octx.discrete[oi]:
        val = 0.0 if octx.element_id[oi] == ictx.element_id[ii] else 1.0
    elif octx.no_edges[oi]:
        val = 0.0  # new samples without edges: w_c = 0 and no edges to match
    else:
        val = _min_edge_assignment(
            octx.edge_offsets[oi], ictx.edge_offsets[ii]
        ) + params.w_c * abs(int(octx.degree[oi]) - int(ictx.degree[ii]))
    per_input[key] = val
    return val


def _attr_diff_matrix(
    octx: GraphContext,
    ictx: GraphContext,
    out_idx: np.ndarray,
    in_idx: np.ndarray,
    params: MatchParams,
) -> np.ndarray:
    """Attribute differences for candidate pair grids.

    Individual pair values are memoized on the context (the contexts are
    frozen snapshots), so assembling the grid from scalars is cheap."""
    na, nb = len(out_idx), len(in_idx)
    out = np.empty((na, nb))
    for i in range(na):
        oi = int(out_idx[i])
        for j in range(nb):
            out[i, j] = _attr_diff(octx, ictx, oi, int(in_idx[j]), params)
    return out


def _compat_mask(octx, ictx, out_idx, in_idx) -> np.ndarray:
    """True where a pair is allowed: same kind; same element_id for discrete."""
    disc_a = octx.discrete[out_idx][:, None]
    disc_b = ictx.discrete[in_idx][None, :]
    ok = disc_a == disc_b
    both_disc = disc_a & disc_b
    same_id = octx.element_id[out_idx][:, None] == ictx.element_id[in_idx][None, :]
    return ok & (~both_disc | same_id)


def _pair_cost_matrix(octx, ictx, out_idx, in_idx, rel_out, rel_in, params):
    pos_term = np.linalg.norm(rel_out[:, None, :] - rel_in[None, :, :], axis=-1)
    attr = _attr_diff_matrix(octx, ictx, out_idx, in_idx, params)
    cost = pos_term + params.w_a * attr
    cost[~_compat_mask(octx, ictx, out_idx, in_idx)] = _FORBIDDEN
    return cost


def _reachable_junction_ends(ctx: GraphContext, start: int, allowed: set, matched: set) -> list:
    """Unmatched non-path samples reachable from `start` through graph edges,
    traversing (but not collecting) degree-2 path samples, restricted to the
    neighborhood `allowed`."""
    found = []
    seen = {start}
    stack = [start]
    while stack:
        cur = stack.pop()
        for nxt in ctx.adjacency[cur]:
            if nxt in seen or nxt not in allowed:
                continue
            seen.add(nxt)
            if ctx.degree[nxt] == 2:
                stack.append(nxt)  # pass through path samples
            elif nxt not in matched:
                found.append(nxt)
    return sorted(found)


def _assign_with_reservation(costs: np.ndarray, kappa: float):
    """Linear assignment where any output row may stay unmatched at price
    kappa: the matrix is padded with one private dummy column per row, so a
    pair is only matched when that is cheaper than paying the unmatched
    penalty."""
    n_o, n_i = costs.shape
    dummies = np.full((n_o, n_o), _FORBIDDEN)
    np.fill_diagonal(dummies, kappa)
    padded = np.hstack([costs, dummies])
    rows, cols = linear_sum_assignment(padded)
    return [
        (int(r), int(c))
        for r, c in zip(rows, cols)
        if c < n_i and padded[r, c] < _FORBIDDEN / 2
    ]


def _match_impl(
    octx: GraphContext,
    ictx: GraphContext,
    oc: int,
    ic: int,
    radius: float,
    params: MatchParams,
):
    """Greedy BFS matcher on context indices.

    Returns (pairs, unmatched_out, cost): pairs excludes the center pair,
    positions are neighborhood-local, cost is the robust neighborhood
    similarity."""
    out_nbr = octx.neighborhood_idx(oc, radius)
    in_nbr = ictx.neighborhood_idx(ic, radius)
    out_set = set(out_nbr.tolist())
    in_set = set(in_nbr.tolist())
    rel_out_all = {i: octx.pos[i] - octx.pos[oc] for i in out_set}
    rel_in_all = {j: ictx.pos[j] - ictx.pos[ic] for j in in_set}

    matched_out: dict = {}
    matched_in: set = {ic}
    # The centers are matched by definition; their positional term is zero but
    # the attribute term still counts, so a mismatched center (e.g. a path end
    # matched to an interior sample) is not free.
    cost_total = params.w_a * float(
        _attr_diff_matrix(
            octx, ictx, np.array([oc]), np.array([ic]), params
        )[0, 0]
    )
    queue = [(oc, ic)]
    qi = 0
    while qi < len(queue):
        po, pi_ = queue[qi]
        qi += 1
        cand_out = _reachable_junction_ends(octx, po, out_set, set(matched_out))
        cand_in = _reachable_junction_ends(ictx, pi_, in_set, matched_in)
        if not cand_out or not cand_in:
            continue
        o_idx = np.array(cand_out, dtype=int)
        i_idx = np.array(cand_in, dtype=int)
        rel_o = np.array([rel_out_all[i] for i in cand_out])
        rel_i = np.array([rel_in_all[j] for j in cand_in])
        costs = _pair_cost_matrix(octx, ictx, o_idx, i_idx, rel_o, rel_i, params)
        for r, c in _assign_with_reservation(costs, params.kappa):
            o, i = int(o_idx[r]), int(i_idx[c])
            matched_out[o] = i
            matched_in.add(i)
            cost_total += float(costs[r, c])
            queue.append((o, i))

    remaining_out = sorted(out_set - set(matched_out))
    remaining_in = sorted(in_set - matched_in)
    if remaining_out and remaining_in:
        o_idx = np.array(remaining_out, dtype=int)
        i_idx = np.array(remaining_in, dtype=int)
        rel_o = np.array([rel_out_all[i] for i in remaining_out])
        rel_i = np.array([rel_in_all[j] for j in remaining_in])
        costs = _pair_cost_matrix(octx, ictx, o_idx, i_idx, rel_o, rel_i, params)
        for r, c in _assign_with_reservation(costs, params.kappa):
            matched_out[int(o_idx[r])] = int(i_idx[c])
            cost_total += float(costs[r, c])

    unmatched = out_set - set(matched_out)
    cost_total += params.kappa * len(unmatched)
    return matched_out, unmatched, cost_total


def _circular_diff_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = np.abs(a[:, None] - b[None, :]) % TWO_PI
    return np.minimum(d, TWO_PI - d)


def _orientation_pairing(oa: np.ndarray, ob: np.ndarray) -> dict:
    if len(oa) == 0 or len(ob) == 0:
        return {}
    d = _circular_diff_matrix(oa, ob)
    rows, cols = linear_sum_assignment(d)
    return {int(r): int(c) for r, c in zip(rows, cols)}


def _edge_pairing(octx, ictx, oi, ii) -> dict:
    off_a = octx.edge_offsets[oi]
    off_b = ictx.edge_offsets[ii]
    if len(off_a) == 0 or len(off_b) == 0:
        return {}
    d = np.linalg.norm(off_a[:, None, :] - off_b[None, :, :], axis=-1)
    rows, cols = linear_sum_assignment(d)
    return {
        octx.edge_ids[oi][r]: ictx.edge_ids[ii][c] for r, c in zip(rows, cols)
    }


def build_match_map(
    octx: GraphContext,
    ictx: GraphContext,
    oc: int,
    ic: int,
    radius: float,
    params: MatchParams,
) -> tuple:
    """Full MatchMap (with edge/orientation pairings) plus its cost."""
    matched, unmatched, cost = _match_impl(octx, ictx, oc, ic, radius, params)
    mm = MatchMap(
        out_center=int(octx.ids[oc]),
        in_center=int(ictx.ids[ic]),
        sample_pairs={int(octx.ids[o]): int(ictx.ids[i]) for o, i in matched.items()},
        unmatched_output={int(octx.ids[o]) for o in unmatched},
    )
    for o, i in [(oc, ic)] + sorted(matched.items()):
        osid = int(octx.ids[o])
        mm.edge_pairs[osid] = _edge_pairing(octx, ictx, o, i)
        mm.orientation_pairs[osid] = _orientation_pairing(
            octx.orients[o], ictx.orients[i]
        )
    return mm, cost


def match_cost(
    octx: GraphContext,
    ictx: GraphContext,
    oc: int,
    ic: int,
    radius: float,
    params: MatchParams,
) -> float:
    """Robust neighborhood similarity of matching oc's neighborhood to ic's."""
    if octx.discrete[oc] != ictx.discrete[ic]:
        return math.inf
    if octx.discrete[oc] and octx.element_id[oc] != ictx.element_id[ic]:
        return math.inf
    return _match_impl(octx, ictx, oc, ic, radius, params)[2]


def match_neighborhoods(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    out_center: int,
    in_center: int,
    radius: float,
    cfg: SynthesisConfig,
) -> MatchMap:
    octx = GraphContext(out_graph)
    ictx = GraphContext(in_graph)
    params = MatchParams.from_config(cfg, min(out_graph.level, cfg.levels - 1))
    mm, _ = build_match_map(
        octx, ictx, octx.index[out_center], ictx.index[in_center], radius, params
    )
    return mm
