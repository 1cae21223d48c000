"""Search step: PatchMatch over the sample kNN graph, maintaining an
approximate-nearest-neighbor field from output samples to input samples."""

from __future__ import annotations

import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .graph import PatternGraph, SynthesisConfig
from .matching import GraphContext, MatchParams, match_cost

__all__ = ["AnnField", "init_field", "patchmatch"]


class AnnField:
    """Map output sample id -> (input sample id, cached neighborhood cost)."""

    def __init__(self):
        self.match: dict = {}
        self.cost: dict = {}

    def ids(self):
        return sorted(self.match)

    def total_cost(self) -> float:
        return float(sum(self.cost.values()))

    def copy(self) -> "AnnField":
        f = AnnField()
        f.match = dict(self.match)
        f.cost = dict(self.cost)
        return f


def _compatible_inputs(ictx: GraphContext, octx: GraphContext, oi: int) -> np.ndarray:
    if octx.discrete[oi]:
        mask = ictx.discrete & (ictx.element_id == octx.element_id[oi])
    else:
        mask = ~ictx.discrete
    return np.where(mask)[0]


def init_field(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    prev: AnnField = None,
    cfg: SynthesisConfig = None,
    rng: np.random.Generator = None,
) -> AnnField:
    """Random valid field; surviving entries of `prev` are reused."""
    if len(in_graph.samples) == 0:
        raise ValueError("empty input graph")
    cfg = cfg or SynthesisConfig()
    rng = rng or np.random.default_rng(cfg.seed)
    octx = GraphContext(out_graph)
    ictx = GraphContext(in_graph)
    field = AnnField()
    in_ids = set(in_graph.samples)
    for oi, osid_arr in enumerate(octx.ids):
        osid = int(osid_arr)
        if prev is not None and osid in prev.match and prev.match[osid] in in_ids:
            field.match[osid] = prev.match[osid]
            field.cost[osid] = prev.cost.get(osid, math.inf)
            continue
        pool = _compatible_inputs(ictx, octx, oi)
        if len(pool) == 0:
            raise ValueError(
                f"no compatible input sample for output sample {osid}"
            )
        pick = int(pool[rng.integers(len(pool))])
        field.match[osid] = int(ictx.ids[pick])
        field.cost[osid] = math.inf
    return field


def _bfs_order(adjacency: list, n: int, start: int) -> list:
    """BFS over the kNN graph covering every component; returns index order."""
    order = []
    seen = np.zeros(n, dtype=bool)
    queue = deque()
    for root in [start] + list(range(n)):
        if seen[root]:
            continue
        seen[root] = True
        queue.append(root)
        while queue:
            cur = queue.popleft()
            order.append(cur)
            for nxt in adjacency[cur]:
                if not seen[nxt]:
                    seen[nxt] = True
                    queue.append(nxt)
    return order


def _knn_adjacency(octx: GraphContext, k: int) -> list:
    n = len(octx.ids)
    adj = [set() for _ in range(n)]
    if n <= 1:
        return [sorted(a) for a in adj]
    kk = min(k + 1, n)
    _, idx = octx.tree.query(octx.pos, k=kk)
    idx = np.atleast_2d(idx)
    for i in range(n):
        for j in idx[i]:
            j = int(j)
            if j != i:
                adj[i].add(j)
                adj[j].add(i)
    return [sorted(a) for a in adj]


# Candidates drawn per search window; sparse sample sets need more than one
# draw for distant zero-cost matches to stay reachable in few iterations.
_SEARCH_DRAWS = 4


def _window_radii(cfg: SynthesisConfig, extent: float = 0.0) -> list:
    """Decaying search-window radii; the first window spans the whole input
    so every sample stays reachable regardless of the current match."""
    w_max, w_min, decay = cfg.search_window
    radii = []
    w = max(float(w_max), float(extent))
    while w >= w_min:
        radii.append(w)
        w /= decay
    return radii or [float(w_min)]


def patchmatch(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    field: AnnField,
    iters: int,
    cfg: SynthesisConfig,
    rng: np.random.Generator = None,
    octx: GraphContext = None,
    ictx: GraphContext = None,
) -> AnnField:
    """Run `iters` propagation + random-search passes in kNN BFS order.

    Each accepted move strictly decreases that entry's cached cost; per-entry
    cost is monotonically non-increasing."""
    rng = rng or np.random.default_rng(cfg.seed)
    octx = octx or GraphContext(out_graph)
    ictx = ictx or GraphContext(in_graph)
    level = min(out_graph.level, cfg.levels - 1)
    params = MatchParams.from_config(cfg, level)
    radius = cfg.radii[level]
    d = cfg.sampling_distances[level]
    n = len(octx.ids)
    if n == 0:
        return field

    adjacency = _knn_adjacency(octx, cfg.knn_k)
    extent = float(np.linalg.norm(ictx.pos.max(axis=0) - ictx.pos.min(axis=0)))
    windows = _window_radii(cfg, extent)
    idx_of = octx.index
    ids = octx.ids

    # pair costs are constant while both graphs are frozen, so memoize them
    # for the duration of this call
    memo: dict = {}

    def pair_cost(oi: int, ci: int) -> float:
        key = (oi, ci)
        c = memo.get(key)
        if c is None:
            c = match_cost(octx, ictx, oi, ci, radius, params)
            memo[key] = c
        return c

    # refresh cached costs for the current assignment; the per-sample
    # evaluations are independent, so this step can fan out over workers
    refresh = [(int(ids[oi]), oi, ictx.index[field.match[int(ids[oi])]]) for oi in range(n)]
    if cfg.workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            for (osid, _, _), c in zip(
                refresh, pool.map(lambda t: pair_cost(t[1], t[2]), refresh)
            ):
                field.cost[osid] = c
    else:
        for osid, oi, ii in refresh:
            field.cost[osid] = pair_cost(oi, ii)

    start = 0
    for _ in range(iters):
        order = _bfs_order(adjacency, n, start)
        for oi in order:
            osid = int(ids[oi])
            cur_cost = field.cost[osid]
            cur_match = field.match[osid]
            # propagation from kNN neighbors
            candidates = []
            for nbr in adjacency[oi]:
                nsid = int(ids[nbr])
                m = field.match[nsid]
                mi = ictx.index[m]
                target = ictx.pos[mi] + (octx.pos[oi] - octx.pos[nbr])
                near = ictx.tree.query_ball_point(target, d)
                if near:
                    near = sorted(
                        near,
                        key=lambda j: float(
                            np.hypot(*(ictx.pos[j] - target))
                        ),
                    )[:3]
                    candidates.extend(near)
            seen = set()
            for ci in candidates:
                cand_sid = int(ictx.ids[ci])
                if cand_sid == cur_match or cand_sid in seen:
                    continue
                seen.add(cand_sid)
                if ictx.discrete[ci] != octx.discrete[oi]:
                    continue
                if octx.discrete[oi] and ictx.element_id[ci] != octx.element_id[oi]:
                    continue
                c = pair_cost(oi, ci)
                if c < cur_cost:
                    cur_cost = c
                    cur_match = cand_sid
            # random search in decaying windows around the current match
            for w in windows:
                center = ictx.pos[ictx.index[cur_match]]
                near = ictx.tree.query_ball_point(center, w)
                if not near:
                    continue
                near = sorted(near)
                draws = min(_SEARCH_DRAWS, len(near))
                for ci in rng.choice(len(near), size=draws, replace=False):
                    ci = int(near[int(ci)])
                    cand_sid = int(ictx.ids[ci])
                    if cand_sid == cur_match or cand_sid in seen:
                        continue
                    seen.add(cand_sid)
                    if ictx.discrete[ci] != octx.discrete[oi]:
                        continue
                    if octx.discrete[oi] and ictx.element_id[ci] != octx.element_id[oi]:
                        continue
                    c = pair_cost(oi, ci)
                    if c < cur_cost:
                        cur_cost = c
                        cur_match = cand_sid
            field.match[osid] = cur_match
            field.cost[osid] = cur_cost
        if order:
            start = order[-1]  # next pass starts from the last visited sample
    return field
