"""Hierarchical synthesis orchestration: initialization, per-level
search/assignment loops, level-to-level upsampling, and energy reporting."""

from __future__ import annotations

import logging
import math

import numpy as np

from .assignment import (
    assign_edges,
    assign_existence,
    assign_orientations,
    assign_positions,
    collect_votes,
    compute_match_maps,
    generate_candidates,
)
from .geometry import Point2, Region, contains, distance_to_boundary
from .graph import CONTINUOUS, DISCRETE, PatternGraph, Sample, SynthesisConfig
from .matching import GraphContext, MatchParams, match_cost
from .reconstruct import DiscreteTemplates, fit_curves, reconstruct, similarity_fit, trace_paths
from .sampler import build_hierarchy, sample_continuous
from .io import VectorDocument

log = logging.getLogger(__name__)

__all__ = ["SynthesisSession", "synthesize"]

TWO_PI = 2 * math.pi


def _domain_energy(graph: PatternGraph, domain: Region) -> float:
    total = 0.0
    for sid in sorted(graph.samples):
        x, y = graph.samples[sid].position
        p = Point2(x, y)
        if not contains(domain, p):
            dist, _ = distance_to_boundary(domain, p)
            total += dist * dist
    return total


class SynthesisSession:
    """One synthesis run: exemplar hierarchy, per-level output graphs, config,
    output domain, optional fixed pre-existing content, and energy traces."""

    def __init__(
        self,
        exemplar: VectorDocument,
        domain: Region,
        cfg: SynthesisConfig = None,
        fixed_doc: VectorDocument = None,
    ):
        self.cfg = cfg or SynthesisConfig()
        self.exemplar = exemplar
        self.domain = domain
        self.rng = np.random.default_rng(self.cfg.seed)
        self.hierarchy = build_hierarchy(exemplar, self.cfg)
        self.templates = (
            DiscreteTemplates(exemplar, self.cfg) if exemplar.element_groups else None
        )
        self.fixed_hierarchy = None
        if fixed_doc is not None and not fixed_doc.is_empty():
            self.fixed_hierarchy = build_hierarchy(fixed_doc, self.cfg)
        self.out_levels = [None] * self.cfg.levels
        self.energy_trace = [[] for _ in range(self.cfg.levels)]
        self.churn_removed = 0
        self.churn_added = 0
        self._field = None
        self._instance_counter = 1_000_000  # ids for synthesized element instances

    # -- initialization -----------------------------------------------------

    def initialize(self, mode: str = "patch") -> PatternGraph:
        if mode not in ("patch", "white_noise"):
            raise ValueError(f"unknown initialization mode {mode!r}")
        cfg = self.cfg
        d0 = cfg.sampling_distances[0]
        dx0, dy0, dx1, dy1 = (
            self.domain.bbox()
        )
        if (dx1 - dx0) < d0 and (dy1 - dy0) < d0:
            raise ValueError("output domain smaller than one sample spacing")
        in_graph = self.hierarchy.levels[0]
        out = PatternGraph(level=0, sampling_distance=d0)
        if mode == "patch":
            self._init_patch(out, in_graph)
        else:
            self._init_white_noise(out, in_graph)
        self._insert_fixed(out, 0)
        self.out_levels[0] = out
        self._field = None
        self.energy_trace[0] = []
        return out

    def _init_patch(self, out: PatternGraph, in_graph: PatternGraph) -> None:
        """Tile the exemplar graph over the domain with per-tile jitter."""
        ex0x, ex0y, ex1x, ex1y = self.exemplar.bbox()
        w_e = max(ex1x - ex0x, 1e-9)
        h_e = max(ex1y - ex0y, 1e-9)
        dx0, dy0, dx1, dy1 = self.domain.bbox()
        jitter = self.cfg.jitter(0)
        nx = int(math.ceil((dx1 - dx0) / w_e - 1e-9))
        ny = int(math.ceil((dy1 - dy0) / h_e - 1e-9))
        seen = set()
        for tj in range(ny):
            for ti in range(nx):
                jit = self.rng.uniform(-jitter, jitter, size=2) if jitter > 0 else (0.0, 0.0)
                off_x = dx0 + ti * w_e - ex0x + jit[0]
                off_y = dy0 + tj * h_e - ex0y + jit[1]
                # clamp edge tiles so no content falls outside the domain box;
                # overshoot folds into overlap with the neighboring tile, which
                # existence voting cleans up
                if ti == 0:
                    off_x = max(off_x, dx0 - ex0x)
                if ti == nx - 1:
                    off_x = min(off_x, max(dx1 - ex1x, dx0 - ex0x))
                if tj == 0:
                    off_y = max(off_y, dy0 - ex0y)
                if tj == ny - 1:
                    off_y = min(off_y, max(dy1 - ex1y, dy0 - ex0y))
                off = np.array([off_x, off_y])
                sid_map = {}
                inst_map = {}
                for sid in sorted(in_graph.samples):
                    s = in_graph.samples[sid]
                    pos = np.array(s.position) + off
                    if not contains(self.domain, Point2(*pos)):
                        continue
                    key = (round(pos[0], 6), round(pos[1], 6))
                    if key in seen:
                        continue  # exact duplicate on a tile seam
                    seen.add(key)
                    inst = -1
                    if s.kind == DISCRETE:
                        if s.element_instance not in inst_map:
                            inst_map[s.element_instance] = self._instance_counter
                            self._instance_counter += 1
                        inst = inst_map[s.element_instance]
                    sid_map[sid] = out.add_sample(
                        Sample(
                            position=(float(pos[0]), float(pos[1])),
                            kind=s.kind,
                            element_id=s.element_id,
                            element_instance=inst,
                            orientations=list(s.orientations),
                        )
                    )
                for eid in sorted(in_graph.edges):
                    e = in_graph.edges[eid]
                    if e.a in sid_map and e.b in sid_map:
                        out.add_edge(sid_map[e.a], sid_map[e.b])

    def _init_white_noise(self, out: PatternGraph, in_graph: PatternGraph) -> None:
        """Scatter exemplar-density random copies of input samples, no edges."""
        ex0x, ex0y, ex1x, ex1y = self.exemplar.bbox()
        area_e = max((ex1x - ex0x) * (ex1y - ex0y), 1e-9)
        density = len(in_graph.samples) / area_e
        n = int(round(density * self.domain.area))
        if n == 0:
            raise ValueError("output domain smaller than one sample spacing")
        dx0, dy0, dx1, dy1 = self.domain.bbox()
        in_ids = sorted(in_graph.samples)
        placed = 0
        attempts = 0
        while placed < n and attempts < 100 * n:
            attempts += 1
            x = self.rng.uniform(dx0, dx1)
            y = self.rng.uniform(dy0, dy1)
            if not contains(self.domain, Point2(x, y)):
                continue
            src = in_graph.samples[in_ids[int(self.rng.integers(len(in_ids)))]]
            inst = -1
            if src.kind == DISCRETE:
                inst = self._instance_counter
                self._instance_counter += 1
            out.add_sample(
                Sample(
                    position=(x, y),
                    kind=src.kind,
                    element_id=src.element_id,
                    element_instance=inst,
                    orientations=list(src.orientations),
                )
            )
            placed += 1

    def _insert_fixed(self, out: PatternGraph, level: int) -> None:
        """Copy pre-existing content near the domain in as immovable samples."""
        if self.fixed_hierarchy is None:
            return
        radius = self.cfg.radii[level]
        src = self.fixed_hierarchy.levels[level]
        sid_map = {}
        for sid in sorted(src.samples):
            s = src.samples[sid]
            p = Point2(*s.position)
            if not contains(self.domain, p):
                dist, _ = distance_to_boundary(self.domain, p)
                if dist > radius:
                    continue
            sid_map[sid] = out.add_sample(
                Sample(
                    position=tuple(s.position),
                    kind=s.kind,
                    element_id=s.element_id,
                    element_instance=s.element_instance,
                    orientations=list(s.orientations),
                    fixed=True,
                )
            )
        for eid in sorted(src.edges):
            e = src.edges[eid]
            if e.a in sid_map and e.b in sid_map:
                out.add_edge(sid_map[e.a], sid_map[e.b])

    # -- per-level optimization ----------------------------------------------

    def run_level(self, level: int) -> PatternGraph:
        from .search import init_field, patchmatch

        cfg = self.cfg
        out = self.out_levels[level]
        if out is None:
            raise ValueError(f"level {level} not initialized")
        in_graph = self.hierarchy.levels[level]
        ictx = GraphContext(in_graph)
        self.energy_trace[level] = []
        for it in range(cfg.iterations_per_level):
            self._field = init_field(out, in_graph, self._field, cfg, self.rng)
            pm_iters = cfg.patchmatch_iters[0] if it == 0 else cfg.patchmatch_iters[1]
            octx = GraphContext(out)
            self._field = patchmatch(
                out, in_graph, self._field, pm_iters, cfg, self.rng, octx, ictx
            )
            # energy of the iteration's starting state, with the match field
            # refreshed by the search step
            self.energy_trace[level].append(
                self._field.total_cost() + _domain_energy(out, self.domain)
            )
            maps = compute_match_maps(out, in_graph, self._field, cfg, octx, ictx)
            ledger = collect_votes(out, in_graph, self._field, cfg, match_maps=maps)
            assign_positions(out, ledger, self.domain)
            removed = assign_existence(out, ledger, cfg)
            self.churn_removed += len(removed)
            maps = {k: v for k, v in maps.items() if k in out.samples}
            added = generate_candidates(
                out, in_graph, self._field, cfg, match_maps=maps, ictx=ictx,
                domain=self.domain,
            )
            self.churn_added += len(added)
            assign_edges(out, ledger)
            assign_orientations(out, ledger, self.rng)
        return out

    def energy(self, level: int) -> float:
        """Current pattern energy: best-match neighborhood cost per output
        sample plus the squared out-of-domain distances."""
        from .search import init_field

        out = self.out_levels[level]
        in_graph = self.hierarchy.levels[level]
        self._field = init_field(out, in_graph, self._field, self.cfg, self.rng)
        octx = GraphContext(out)
        ictx = GraphContext(in_graph)
        params = MatchParams.from_config(self.cfg, min(level, self.cfg.levels - 1))
        radius = self.cfg.radii[min(level, self.cfg.levels - 1)]
        total = 0.0
        for osid in sorted(self._field.match):
            isid = self._field.match[osid]
            c = match_cost(
                octx, ictx, octx.index[osid], ictx.index[isid], radius, params
            )
            self._field.cost[osid] = c
            total += c
        return total + _domain_energy(out, self.domain)

    # -- level transitions ----------------------------------------------------

    def upsample(self, from_level: int) -> PatternGraph:
        cfg = self.cfg
        lvl = from_level + 1
        if lvl >= cfg.levels:
            raise ValueError("already at the finest level")
        coarse = self.out_levels[from_level]
        d_fine = cfg.sampling_distances[lvl]
        # reconstruct and re-sample the synthesized (non-fixed) content
        synth = coarse.copy()
        for sid in [s for s in sorted(synth.samples) if synth.samples[s].fixed]:
            synth.remove_sample(sid)
        try:
            doc = fit_curves(
                trace_paths(synth, band=cfg.opposite_pair_band), synth
            )
            fine = sample_continuous(doc, d_fine, level=lvl)
        except Exception:
            log.warning("reconstruction failed at level %d; midpoint fallback", from_level)
            fine = _midpoint_upsample(synth, lvl, d_fine)
        self._upsample_discrete(synth, fine, from_level, lvl)
        self._insert_fixed(fine, lvl)
        self.out_levels[lvl] = fine
        self._field = None  # sample ids change across levels
        return fine

    def _upsample_discrete(
        self, coarse: PatternGraph, fine: PatternGraph, from_level: int, lvl: int
    ) -> None:
        """Expand each synthesized element instance to the finer layout via a
        similarity fit against the template layout."""
        if self.templates is None:
            return
        instances = {}
        for sid in sorted(coarse.samples):
            s = coarse.samples[sid]
            if s.kind == DISCRETE:
                instances.setdefault(s.element_instance, {})[s.element_id] = s.position
        for inst, positions in sorted(instances.items()):
            group = self.templates.group_of(from_level, next(iter(sorted(positions))))
            if group is None:
                continue
            layout_src = self.templates.layout_of_group(from_level, group)
            common = sorted(set(positions) & set(layout_src))
            src = np.array([layout_src[k] for k in common]).reshape(-1, 2)
            dst = np.array([positions[k] for k in common]).reshape(-1, 2)
            scale, rot, t = similarity_fit(src, dst)
            for eid, pos in sorted(self.templates.layout_of_group(lvl, group).items()):
                v = scale * (rot @ np.asarray(pos, dtype=float)) + t
                fine.add_sample(
                    Sample(
                        position=(float(v[0]), float(v[1])),
                        kind=DISCRETE,
                        element_id=eid,
                        element_instance=inst,
                    )
                )

    # -- top-level driver -------------------------------------------------------

    def run(self, init: str = "patch") -> PatternGraph:
        self.initialize(init)
        for lvl in range(self.cfg.levels):
            self.run_level(lvl)
            if lvl < self.cfg.levels - 1:
                self.upsample(lvl)
        return self.out_levels[-1]

    def reconstruct(self, include_fixed: bool = False) -> VectorDocument:
        final = self.out_levels[-1]
        if final is None:
            raise ValueError("synthesis has not run")
        graph = final
        if not include_fixed:
            graph = final.copy()
            for sid in [s for s in sorted(graph.samples) if graph.samples[s].fixed]:
                graph.remove_sample(sid)
        return reconstruct(graph, self.cfg, self.templates)


def _midpoint_upsample(coarse: PatternGraph, lvl: int, d_fine: float) -> PatternGraph:
    """Fallback refinement: copy the coarse graph and split every edge at its
    midpoint."""
    fine = PatternGraph(level=lvl, sampling_distance=d_fine)
    sid_map = {}
    for sid in sorted(coarse.samples):
        s = coarse.samples[sid]
        if s.kind == DISCRETE:
            continue  # discrete samples are expanded separately
        sid_map[sid] = fine.add_sample(
            Sample(
                position=tuple(s.position),
                kind=s.kind,
                orientations=list(s.orientations),
            )
        )
    for eid in sorted(coarse.edges):
        e = coarse.edges[eid]
        pa = np.array(coarse.samples[e.a].position)
        pb = np.array(coarse.samples[e.b].position)
        mid = (pa + pb) / 2.0
        theta = math.atan2(*(pb - pa)[::-1]) % TWO_PI
        m = fine.add_sample(
            Sample(
                position=(float(mid[0]), float(mid[1])),
                orientations=[theta, (theta + math.pi) % TWO_PI],
            )
        )
        fine.add_edge(sid_map[e.a], m)
        fine.add_edge(m, sid_map[e.b])
    return fine


def synthesize(
    exemplar: VectorDocument,
    domain: Region,
    cfg: SynthesisConfig = None,
    init: str = "patch",
    fixed_doc: VectorDocument = None,
) -> tuple:
    """Run the full pipeline; returns (reconstructed document, session)."""
    session = SynthesisSession(exemplar, domain, cfg, fixed_doc)
    session.run(init)
    return session.reconstruct(), session
