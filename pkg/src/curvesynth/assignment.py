"""Assignment step: update output sample positions, existence, edges, and
orientations from votes of overlapping matched neighborhoods."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.linalg import lsqr

from .geometry import Point2, Region, contains, distance_to_boundary
from .graph import CONTINUOUS, DISCRETE, PatternGraph, Sample, SynthesisConfig
from .matching import GraphContext, MatchParams, build_match_map
from .search import AnnField

__all__ = [
    "VoteLedger",
    "compute_match_maps",
    "collect_votes",
    "assign_positions",
    "assign_existence",
    "generate_candidates",
    "assign_edges",
    "assign_orientations",
    "solve_edge_assignment",
    "edge_assignment_objective",
]

TWO_PI = 2 * math.pi


@dataclass
class VoteLedger:
    # (center sid, neighbor sid) -> list of target offsets p(center)-p(neighbor)
    position_votes: list = field(default_factory=list)
    existence_votes: dict = field(default_factory=dict)  # sid -> list of 0/1
    degree_votes: dict = field(default_factory=dict)  # sid -> list of |E(input)|
    # unordered sample pair -> [positive votes, co-matched neighborhood count]
    edge_votes: dict = field(default_factory=dict)
    orientation_votes: dict = field(default_factory=dict)  # sid -> {entry: [angles]}
    orientation_count_votes: dict = field(default_factory=dict)  # sid -> [counts]
    orientation_pool: dict = field(default_factory=dict)  # sid -> [unmatched angles]


def compute_match_maps(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    fld: AnnField,
    cfg: SynthesisConfig,
    octx: GraphContext = None,
    ictx: GraphContext = None,
) -> dict:
    """Full MatchMap per output center for the field's current assignment."""
    octx = octx or GraphContext(out_graph)
    ictx = ictx or GraphContext(in_graph)
    level = min(out_graph.level, cfg.levels - 1)
    params = MatchParams.from_config(cfg, level)
    radius = cfg.radii[level]
    maps = {}
    for osid in sorted(fld.match):
        isid = fld.match[osid]
        mm, _ = build_match_map(
            octx, ictx, octx.index[osid], ictx.index[isid], radius, params
        )
        maps[osid] = mm
    return maps


def collect_votes(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    fld: AnnField,
    cfg: SynthesisConfig,
    match_maps: dict = None,
) -> VoteLedger:
    maps = match_maps or compute_match_maps(out_graph, in_graph, fld, cfg)
    ledger = VoteLedger()
    in_pos = {sid: np.array(s.position) for sid, s in in_graph.samples.items()}
    input_edge = {e.key for e in in_graph.edges.values()}

    for oc, mm in sorted(maps.items()):
        ic = mm.in_center
        # position votes: center -> each matched neighbor
        for osid, isid in sorted(mm.sample_pairs.items()):
            ledger.position_votes.append((oc, osid, in_pos[ic] - in_pos[isid]))
        # existence votes: matched samples (incl. center) 1, unmatched 0
        all_pairs = mm.all_pairs()
        for osid, isid in all_pairs:
            ledger.existence_votes.setdefault(osid, []).append(1.0)
        for osid in sorted(mm.unmatched_output):
            ledger.existence_votes.setdefault(osid, []).append(0.0)
        # degree / orientation votes per matched pair
        for osid, isid in all_pairs:
            si = in_graph.samples[isid]
            so = out_graph.samples[osid]
            if so.kind != CONTINUOUS or si.kind != CONTINUOUS:
                continue
            ledger.degree_votes.setdefault(osid, []).append(len(si.edges))
            ledger.orientation_count_votes.setdefault(osid, []).append(
                len(si.orientations)
            )
            opairs = mm.orientation_pairs.get(osid, {})
            entry_votes = ledger.orientation_votes.setdefault(osid, {})
            for o_entry, i_entry in opairs.items():
                entry_votes.setdefault(o_entry, []).append(
                    si.orientations[i_entry]
                )
            unmatched_in = set(range(len(si.orientations))) - set(opairs.values())
            if unmatched_in:
                pool = ledger.orientation_pool.setdefault(osid, [])
                pool.extend(si.orientations[i] for i in sorted(unmatched_in))
        # edge votes over all co-matched pairs in this neighborhood
        for a in range(len(all_pairs)):
            oa, ia = all_pairs[a]
            if out_graph.samples[oa].kind != CONTINUOUS:
                continue
            for b in range(a + 1, len(all_pairs)):
                ob, ib = all_pairs[b]
                if out_graph.samples[ob].kind != CONTINUOUS:
                    continue
                key = (oa, ob) if oa < ob else (ob, oa)
                ikey = (ia, ib) if ia < ib else (ib, ia)
                entry = ledger.edge_votes.setdefault(key, [0, 0])
                entry[1] += 1
                if ikey in input_edge:
                    entry[0] += 1
    return ledger


def assign_positions(
    out_graph: PatternGraph,
    ledger: VoteLedger,
    domain: Region,
) -> None:
    """Least-squares positions from pairwise offset votes plus a linearized
    domain-constraint term; solved for displacements so an empty system
    leaves positions unchanged."""
    free_ids = [
        sid for sid in sorted(out_graph.samples) if not out_graph.samples[sid].fixed
    ]
    col = {sid: i for i, sid in enumerate(free_ids)}
    if not free_ids:
        return
    pos = {sid: np.array(s.position) for sid, s in out_graph.samples.items()}
    # Gauss-Newton on the nonlinear objective: the domain term is zero inside
    # the region, so it must be re-linearized whenever a solve moves samples
    # across the boundary, otherwise samples get pushed outside unopposed.
    for _ in range(10):
        rows_i, cols_j, vals = [], [], []
        rhs_x, rhs_y = [], []
        r = 0
        for a, b, target in ledger.position_votes:
            if a not in pos or b not in pos:
                continue
            residual = target - (pos[a] - pos[b])
            any_free = False
            if a in col:
                rows_i.append(r)
                cols_j.append(col[a])
                vals.append(1.0)
                any_free = True
            if b in col:
                rows_i.append(r)
                cols_j.append(col[b])
                vals.append(-1.0)
                any_free = True
            if not any_free:
                continue
            rhs_x.append(residual[0])
            rhs_y.append(residual[1])
            r += 1
        if domain is not None:
            for sid in free_ids:
                p = Point2(*pos[sid])
                if not contains(domain, p):
                    _, nearest = distance_to_boundary(domain, p)
                    rows_i.append(r)
                    cols_j.append(col[sid])
                    vals.append(1.0)
                    rhs_x.append(nearest.x - p.x)
                    rhs_y.append(nearest.y - p.y)
                    r += 1
        if r == 0:
            return
        A = coo_matrix((vals, (rows_i, cols_j)), shape=(r, len(free_ids))).tocsr()
        # conlim=0 disables the condition-number guard: the system is gauge-
        # singular (global translation) and lsqr's minimum-norm solution is
        # the displacement we want
        kw = dict(
            atol=1e-14, btol=1e-14, conlim=0.0, iter_lim=8 * (len(free_ids) + r)
        )
        dx = lsqr(A, np.array(rhs_x), **kw)[0]
        dy = lsqr(A, np.array(rhs_y), **kw)[0]
        step = 0.0
        for sid, i in col.items():
            pos[sid] = pos[sid] + np.array([float(dx[i]), float(dy[i])])
            step = max(step, abs(float(dx[i])), abs(float(dy[i])))
        if domain is None or step < 1e-9:
            break
    for sid in free_ids:
        out_graph.samples[sid].position = (float(pos[sid][0]), float(pos[sid][1]))


def assign_existence(
    out_graph: PatternGraph, ledger: VoteLedger, cfg: SynthesisConfig
) -> set:
    """Mean of existence votes; removes samples strictly below the threshold."""
    removed = set()
    for sid in sorted(out_graph.samples):
        sample = out_graph.samples[sid]
        votes = ledger.existence_votes.get(sid)
        if sample.fixed:
            sample.existence = 1.0
            continue
        if not votes:
            continue
        eta = float(np.mean(votes))
        sample.existence = min(max(eta, 0.0), 1.0)
        if sample.existence < cfg.existence_threshold:
            removed.add(sid)
    for sid in removed:
        out_graph.remove_sample(sid)
    return removed


def generate_candidates(
    out_graph: PatternGraph,
    in_graph: PatternGraph,
    fld: AnnField,
    cfg: SynthesisConfig,
    match_maps: dict = None,
    octx: GraphContext = None,
    ictx: GraphContext = None,
    domain: Region = None,
) -> list:
    """Spawn new output samples from unmatched input samples in matched
    neighborhoods: greedy clustering, merge by averaging, accept at eta > 0.5."""
    octx = octx or GraphContext(out_graph)
    ictx = ictx or GraphContext(in_graph)
    maps = match_maps or compute_match_maps(out_graph, in_graph, fld, cfg, octx, ictx)
    level = min(out_graph.level, cfg.levels - 1)
    d = cfg.sampling_distances[level]
    radius = cfg.radii[level]

    candidates = []  # (position, input sid, input->output map of the voting pair)
    for oc, mm in sorted(maps.items()):
        ic = mm.in_center
        ici = ictx.index[ic]
        in_nbr = ictx.neighborhood_idx(ici, radius)
        inverse = {isid: osid for osid, isid in mm.all_pairs()}
        p_oc = octx.pos[octx.index[oc]]
        p_ic = ictx.pos[ici]
        for ii in in_nbr:
            isid = int(ictx.ids[ii])
            if isid in inverse:
                continue
            pos = ictx.pos[ii] - p_ic + p_oc
            candidates.append((pos, isid, inverse))

    clusters = []  # [sum position, count, first input sid, members]
    for pos, isid, inverse in candidates:
        best = None
        best_d = math.inf
        for ci, (psum, count, _, _) in enumerate(clusters):
            center = psum / count
            dist = float(np.hypot(*(center - pos)))
            if dist < best_d:
                best_d = dist
                best = ci
        if best is not None and best_d < 0.5 * d:
            clusters[best][0] = clusters[best][0] + pos
            clusters[best][1] += 1
            clusters[best][3].append((isid, inverse))
        else:
            clusters.append([pos.copy(), 1, isid, [(isid, inverse)]])

    added = []
    if not clusters:
        return added
    out_positions = octx.pos
    for psum, count, isid, members in clusters:
        center = psum / count
        if domain is not None and not contains(
            domain, Point2(float(center[0]), float(center[1]))
        ):
            continue
        if len(out_positions):
            covering = int(
                np.sum(np.linalg.norm(out_positions - center, axis=1) <= radius)
            )
        else:
            covering = 0
        eta = count / covering if covering else 1.0
        if eta <= cfg.existence_threshold:
            continue
        src = in_graph.samples[isid]
        sid = out_graph.add_sample(
            Sample(
                position=(float(center[0]), float(center[1])),
                kind=src.kind,
                element_id=src.element_id,
                element_instance=src.element_instance,
                orientations=list(src.orientations),
                existence=min(eta, 1.0),
            )
        )
        # Connect the new sample right away: map its source's input edges
        # through the neighborhood matches that voted for it, keeping targets
        # a majority of voters agree on.
        target_votes: dict = {}
        for m_isid, inverse in members:
            for eid in in_graph.samples[m_isid].edges:
                other = in_graph.edges[eid].other(m_isid)
                osid = inverse.get(other)
                if osid is not None and osid in out_graph.samples:
                    target_votes[osid] = target_votes.get(osid, 0) + 1
        for osid, votes in sorted(target_votes.items()):
            if votes * 2 > len(members):
                out_graph.add_edge(sid, osid)
        added.append(sid)
    return added


def edge_assignment_objective(kept: set, ebar: dict, expected: dict) -> float:
    """Objective: sum |b - ebar| over candidates + sum |deg - expected|."""
    deg = {sid: 0 for sid in expected}
    for u, v in kept:
        for s in (u, v):
            if s in deg:
                deg[s] += 1
    total = 0.0
    for pair, e in ebar.items():
        b = 1.0 if pair in kept else 0.0
        total += abs(b - e)
    for sid, exp in expected.items():
        total += abs(deg[sid] - exp)
    return total


def solve_edge_assignment(ebar: dict, expected: dict) -> set:
    """Greedy decreasing-confidence labeling followed by 1-opt polishing."""
    deg = {}
    for (u, v) in ebar:
        deg.setdefault(u, 0)
        deg.setdefault(v, 0)

    def deg_term(sid: int, delta: int) -> float:
        if sid not in expected:
            return 0.0
        return abs(deg[sid] + delta - expected[sid])

    kept = set()
    order = sorted(ebar.items(), key=lambda kv: (-kv[1], kv[0]))
    for (u, v), e in order:
        e0 = e + deg_term(u, 0) + deg_term(v, 0)
        e1 = (1.0 - e) + deg_term(u, 1) + deg_term(v, 1)
        if e1 < e0:
            kept.add((u, v))
            deg[u] += 1
            deg[v] += 1
    # 1-opt: flip single edges while the full objective decreases
    improved = True
    while improved:
        improved = False
        for (u, v), e in order:
            pair = (u, v)
            if pair in kept:
                delta = (e - (1.0 - e)) + (deg_term(u, -1) - deg_term(u, 0)) + (
                    deg_term(v, -1) - deg_term(v, 0)
                )
                if delta < -1e-12:
                    kept.discard(pair)
                    deg[u] -= 1
                    deg[v] -= 1
                    improved = True
            else:
                delta = ((1.0 - e) - e) + (deg_term(u, 1) - deg_term(u, 0)) + (
                    deg_term(v, 1) - deg_term(v, 0)
                )
                if delta < -1e-12:
                    kept.add(pair)
                    deg[u] += 1
                    deg[v] += 1
                    improved = True
    return kept


def assign_edges(out_graph: PatternGraph, ledger: VoteLedger) -> set:
    """Reassign the continuous edge set from edge and degree votes.

    Edges between two fixed samples are preserved untouched."""
    ebar = {}
    for pair, (pos_votes, co) in sorted(ledger.edge_votes.items()):
        if pos_votes <= 0 or co <= 0:
            continue
        u, v = pair
        if u not in out_graph.samples or v not in out_graph.samples:
            continue
        ebar[pair] = pos_votes / co
    expected = {
        sid: float(np.mean(votes))
        for sid, votes in ledger.degree_votes.items()
        if sid in out_graph.samples
    }
    kept = solve_edge_assignment(ebar, expected)

    voted = set(ledger.existence_votes)
    for eid in list(out_graph.edges):
        edge = out_graph.edges[eid]
        if (
            out_graph.samples[edge.a].fixed
            and out_graph.samples[edge.b].fixed
        ):
            continue
        if edge.a not in voted or edge.b not in voted:
            # an endpoint was added after vote collection; its edges were just
            # wired from its source sample and have no votes yet
            continue
        if edge.key not in kept:
            out_graph.remove_edge(eid)
    for u, v in sorted(kept):
        out_graph.add_edge(u, v)
    return kept


def _circular_mean(angles) -> float:
    a = np.asarray(angles, dtype=float)
    return float(math.atan2(np.sin(a).mean(), np.cos(a).mean()) % TWO_PI)


def _circular_variance(angles) -> float:
    a = np.asarray(angles, dtype=float)
    return float(1.0 - np.hypot(np.sin(a).mean(), np.cos(a).mean()))


def _circular_median(angles: list) -> float:
    best = None
    best_cost = math.inf
    for cand in sorted(angles):
        cost = sum(
            min(abs(cand - a) % TWO_PI, TWO_PI - abs(cand - a) % TWO_PI)
            for a in angles
        )
        if cost < best_cost - 1e-15:
            best_cost = cost
            best = cand
    return float(best)


def assign_orientations(
    out_graph: PatternGraph,
    ledger: VoteLedger,
    rng: np.random.Generator = None,
) -> None:
    rng = rng or np.random.default_rng(0)
    for sid in sorted(out_graph.samples):
        sample = out_graph.samples[sid]
        if sample.kind != CONTINUOUS or sample.fixed:
            continue
        count_votes = ledger.orientation_count_votes.get(sid)
        if not count_votes:
            continue
        target = int(math.floor(np.mean(count_votes) + 0.5))
        entry_votes = ledger.orientation_votes.get(sid, {})
        entries = list(sample.orientations)
        variances = []
        for i in range(len(entries)):
            votes = entry_votes.get(i)
            if votes:
                entries[i] = _circular_mean(votes)
                variances.append(_circular_variance(votes))
            else:
                variances.append(math.inf)  # unsupported entries drop first
        while len(entries) > target:
            worst = max(range(len(entries)), key=lambda i: (variances[i], i))
            entries.pop(worst)
            variances.pop(worst)
        pool = list(ledger.orientation_pool.get(sid, []))
        first_insert = True
        while len(entries) < target and pool:
            if first_insert:
                pick = _circular_median(pool)
                first_insert = False
            else:
                pick = float(pool[rng.integers(len(pool))])
            entries.append(pick % TWO_PI)
        sample.orientations = entries
