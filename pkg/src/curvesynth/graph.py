"""Attributed pattern-graph data model for one hierarchy level.

A PatternGraph holds samples (position, attributes, existence confidence)
and undirected edges. Samples of discrete elements carry an element id and
no edges; continuous samples carry an edge set plus local path orientations.
Bidirectional sample<->edge consistency is restored by every mutator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Sample",
    "Edge",
    "PatternGraph",
    "SynthesisConfig",
    "knn_graph",
    "neighborhood",
]

CONTINUOUS = "continuous"
DISCRETE = "discrete"


@dataclass
class Sample:
    position: tuple  # (x, y)
    kind: str = CONTINUOUS
    element_id: int = -1
    element_instance: int = -1
    edges: set = field(default_factory=set)  # EdgeIds
    orientations: list = field(default_factory=list)  # angles in [0, 2pi)
    existence: float = 1.0
    fixed: bool = False  # pre-existing user content; never moved/removed

    def __post_init__(self):
        if self.kind == DISCRETE:
            if self.element_id < 0:
                raise ValueError("discrete sample needs element_id >= 0")
            if self.edges:
                raise ValueError("discrete sample cannot have edges")
        elif self.kind == CONTINUOUS:
            if self.element_id != -1:
                raise ValueError("continuous sample must have element_id = -1")
        else:
            raise ValueError(f"unknown sample kind {self.kind!r}")
        if not (0.0 <= self.existence <= 1.0):
            raise ValueError("existence must be in [0, 1]")
        self.orientations = [float(a) % (2 * math.pi) for a in self.orientations]


@dataclass
class Edge:
    a: int
    b: int
    existence: float = 1.0

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError("self-loop")
        if not (0.0 <= self.existence <= 1.0):
            raise ValueError("edge existence must be in [0, 1]")

    @property
    def key(self) -> tuple:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)

    def other(self, sid: int) -> int:
        if sid == self.a:
            return self.b
        if sid == self.b:
            return self.a
        raise KeyError(f"sample {sid} not an endpoint of this edge")


class PatternGraph:
    def __init__(self, level: int = 0, sampling_distance: float = 1.0):
        self.level = level
        self.sampling_distance = float(sampling_distance)
        self.samples: dict = {}
        self.edges: dict = {}
        self._next_sample_id = 0
        self._next_edge_id = 0
        self._edge_by_key: dict = {}

    # -- mutators ---------------------------------------------------------

    def add_sample(self, sample: Sample, sid: int = None) -> int:
        if sid is None:
            sid = self._next_sample_id
        elif sid in self.samples:
            raise KeyError(f"sample id {sid} already in use")
        self._next_sample_id = max(self._next_sample_id, sid + 1)
        sample.edges = set(sample.edges)
        self.samples[sid] = sample
        return sid

    def remove_sample(self, sid: int) -> None:
        sample = self._get_sample(sid)
        for eid in list(sample.edges):
            self.remove_edge(eid)
        del self.samples[sid]

    def add_edge(self, a: int, b: int, existence: float = 1.0) -> int:
        if a == b:
            raise ValueError("self-loop")
        self._get_sample(a)
        self._get_sample(b)
        key = (a, b) if a < b else (b, a)
        existing = self._edge_by_key.get(key)
        if existing is not None:
            return existing  # idempotent
        eid = self._next_edge_id
        self._next_edge_id += 1
        self.edges[eid] = Edge(a, b, existence)
        self._edge_by_key[key] = eid
        self.samples[a].edges.add(eid)
        self.samples[b].edges.add(eid)
        return eid

    def remove_edge(self, eid: int) -> None:
        edge = self.edges.get(eid)
        if edge is None:
            raise KeyError(f"unknown edge id {eid}")
        self.samples[edge.a].edges.discard(eid)
        self.samples[edge.b].edges.discard(eid)
        del self._edge_by_key[edge.key]
        del self.edges[eid]

    def _get_sample(self, sid: int) -> Sample:
        sample = self.samples.get(sid)
        if sample is None:
            raise KeyError(f"unknown sample id {sid}")
        return sample

    # -- queries ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.samples)

    def degree(self, sid: int) -> int:
        return len(self._get_sample(sid).edges)

    def edge_between(self, a: int, b: int):
        key = (a, b) if a < b else (b, a)
        return self._edge_by_key.get(key)

    def adjacent(self, sid: int):
        """Sample ids connected to sid by an edge."""
        s = self._get_sample(sid)
        return [self.edges[eid].other(sid) for eid in s.edges]

    def positions(self) -> tuple:
        """(ids array, positions array (n, 2)) in stable id order."""
        ids = np.array(sorted(self.samples), dtype=int)
        pos = np.array([self.samples[i].position for i in ids], dtype=float)
        return ids, pos.reshape(len(ids), 2)

    def check_consistency(self) -> None:
        for eid, edge in self.edges.items():
            for sid in (edge.a, edge.b):
                if sid not in self.samples:
                    raise AssertionError(f"edge {eid} references unknown sample {sid}")
                if eid not in self.samples[sid].edges:
                    raise AssertionError(f"sample {sid} missing edge {eid}")
        for sid, sample in self.samples.items():
            for eid in sample.edges:
                if eid not in self.edges:
                    raise AssertionError(f"sample {sid} lists unknown edge {eid}")

    def copy(self) -> "PatternGraph":
        g = PatternGraph(self.level, self.sampling_distance)
        g._next_sample_id = self._next_sample_id
        g._next_edge_id = self._next_edge_id
        for sid, s in self.samples.items():
            g.samples[sid] = Sample(
                position=tuple(s.position),
                kind=s.kind,
                element_id=s.element_id,
                element_instance=s.element_instance,
                edges=set(s.edges),
                orientations=list(s.orientations),
                existence=s.existence,
                fixed=s.fixed,
            )
        for eid, e in self.edges.items():
            g.edges[eid] = Edge(e.a, e.b, e.existence)
            g._edge_by_key[e.key] = eid
        return g


@dataclass
class SynthesisConfig:
    radii: tuple = (60.0, 50.0, 40.0)
    sampling_distances: tuple = (40.0, 30.0, 25.0)
    levels: int = 3
    attribute_weight: float = 0.5  # w_a
    degree_weight: float = None  # w_c; None means "use current level's d"
    unmatched_cost: float = None  # kappa; None means 0.5 * d at current level
    iterations_per_level: int = 7
    patchmatch_iters: tuple = (5, 2)  # initial pass, subsequent passes
    search_window: tuple = (150.0, 25.0, 2.0)  # max, min, decay factor
    knn_k: int = 8
    existence_threshold: float = 0.5
    opposite_pair_band: tuple = (8 * math.pi / 9, 10 * math.pi / 9)
    init_jitter: float = None  # patch-init jitter magnitude; None means d
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        self.radii = tuple(float(r) for r in self.radii)[: self.levels]
        self.sampling_distances = tuple(float(d) for d in self.sampling_distances)[
            : self.levels
        ]
        self.levels = min(self.levels, len(self.radii), len(self.sampling_distances))
        if len(self.radii) != self.levels or len(self.sampling_distances) != self.levels:
            raise ValueError("radii and sampling_distances must have `levels` entries")
        for seq in (self.radii, self.sampling_distances):
            if any(v <= 0 for v in seq):
                raise ValueError("radii and sampling distances must be positive")
            if any(a <= b for a, b in zip(seq, seq[1:])):
                raise ValueError("radii and sampling distances must strictly decrease")

    def w_c(self, level: int) -> float:
        if self.degree_weight is not None:
            return self.degree_weight
        return self.sampling_distances[level]

    def kappa(self, level: int) -> float:
        if self.unmatched_cost is not None:
            return self.unmatched_cost
        return 0.5 * self.sampling_distances[level]

    def jitter(self, level: int) -> float:
        if self.init_jitter is not None:
            return self.init_jitter
        return self.sampling_distances[level]

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "sampling_distances": list(self.sampling_distances),
            "levels": self.levels,
            "attribute_weight": self.attribute_weight,
            "degree_weight": self.degree_weight,
            "unmatched_cost": self.unmatched_cost,
            "iterations_per_level": self.iterations_per_level,
            "patchmatch_iters": list(self.patchmatch_iters),
            "search_window": list(self.search_window),
            "knn_k": self.knn_k,
            "existence_threshold": self.existence_threshold,
            "init_jitter": self.init_jitter,
            "seed": self.seed,
            "workers": self.workers,
        }

    @staticmethod
    def from_dict(d: dict) -> "SynthesisConfig":
        kwargs = {}
        fields = {
            "radii",
            "sampling_distances",
            "levels",
            "attribute_weight",
            "degree_weight",
            "unmatched_cost",
            "iterations_per_level",
            "patchmatch_iters",
            "search_window",
            "knn_k",
            "existence_threshold",
            "init_jitter",
            "seed",
            "workers",
        }
        for k, v in d.items():
            if k not in fields:
                raise ValueError(f"unknown config field {k!r}")
            if k in ("radii", "sampling_distances", "patchmatch_iters", "search_window"):
                v = tuple(v)
            kwargs[k] = v
        return SynthesisConfig(**kwargs)


def knn_graph(graph: PatternGraph, k: int) -> dict:
    """Symmetric k-nearest-neighbor adjacency over sample positions."""
    ids, pos = graph.positions()
    n = len(ids)
    adj = {int(i): set() for i in ids}
    if n <= 1:
        return {i: sorted(v) for i, v in adj.items()}
    d2 = np.sum((pos[:, None, :] - pos[None, :, :]) ** 2, axis=-1)
    np.fill_diagonal(d2, np.inf)
    kk = min(k, n - 1)
    nearest = np.argpartition(d2, kk - 1, axis=1)[:, :kk]
    for row, cols in enumerate(nearest):
        a = int(ids[row])
        for col in cols:
            b = int(ids[col])
            adj[a].add(b)
            adj[b].add(a)  # symmetric closure
    return {i: sorted(v) for i, v in adj.items()}


def neighborhood(graph: PatternGraph, center: int, radius: float) -> set:
    """All samples within `radius` of `center` (closed ball, center excluded)."""
    c = graph._get_sample(center)
    cx, cy = c.position
    r2 = radius * radius
    out = set()
    for sid, s in graph.samples.items():
        if sid == center:
            continue
        dx = s.position[0] - cx
        dy = s.position[1] - cy
        if dx * dx + dy * dy <= r2:
            out.add(sid)
    return out
