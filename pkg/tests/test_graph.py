import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvesynth.graph import (
    CONTINUOUS,
    DISCRETE,
    Edge,
    PatternGraph,
    Sample,
    SynthesisConfig,
    knn_graph,
    neighborhood,
)


def simple_graph(n=4):
    g = PatternGraph()
    sids = [g.add_sample(Sample(position=(float(i * 10), 0.0))) for i in range(n)]
    return g, sids


class TestSample:
    def test_discrete_needs_element_id(self):
        with pytest.raises(ValueError):
            Sample(position=(0, 0), kind=DISCRETE)
        Sample(position=(0, 0), kind=DISCRETE, element_id=3)

    def test_continuous_rejects_element_id(self):
        with pytest.raises(ValueError):
            Sample(position=(0, 0), kind=CONTINUOUS, element_id=2)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            Sample(position=(0, 0), kind="fuzzy")

    def test_existence_range(self):
        with pytest.raises(ValueError):
            Sample(position=(0, 0), existence=1.5)

    def test_orientations_normalized(self):
        s = Sample(position=(0, 0), orientations=[-1.0, 7.0])
        assert all(0.0 <= a < 2 * np.pi for a in s.orientations)


class TestEdge:
    def test_no_self_loop(self):
        with pytest.raises(ValueError):
            Edge(3, 3)

    def test_key_is_sorted(self):
        assert Edge(5, 2).key == (2, 5)

    def test_other(self):
        e = Edge(1, 2)
        assert e.other(1) == 2
        assert e.other(2) == 1
        with pytest.raises(KeyError):
            e.other(9)


class TestPatternGraphMutators:
    def test_add_edge_idempotent(self):
        g, sids = simple_graph()
        e1 = g.add_edge(sids[0], sids[1])
        e2 = g.add_edge(sids[1], sids[0])
        assert e1 == e2
        assert len(g.edges) == 1

    def test_remove_sample_removes_incident_edges(self):
        g, sids = simple_graph()
        g.add_edge(sids[0], sids[1])
        g.add_edge(sids[1], sids[2])
        g.remove_sample(sids[1])
        assert len(g.edges) == 0
        g.check_consistency()

    def test_edge_to_unknown_sample(self):
        g, sids = simple_graph()
        with pytest.raises(KeyError):
            g.add_edge(sids[0], 999)

    def test_duplicate_sample_id(self):
        g, sids = simple_graph()
        with pytest.raises(KeyError):
            g.add_sample(Sample(position=(0, 0)), sid=sids[0])

    def test_copy_is_deep(self):
        g, sids = simple_graph()
        g.add_edge(sids[0], sids[1])
        h = g.copy()
        h.remove_sample(sids[0])
        assert sids[0] in g.samples
        assert len(g.edges) == 1
        g.check_consistency()
        h.check_consistency()

    @given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 9), st.integers(0, 9)), max_size=40))
    @settings(max_examples=100, deadline=None)
    def test_mirror_consistency_after_any_mutator_sequence(self, ops):
        """After any add/remove sequence, sample<->edge mirrors agree."""
        g = PatternGraph()
        sids = []
        for op, a, b in ops:
            if op == 0:
                sids.append(g.add_sample(Sample(position=(float(a), float(b)))))
            elif op == 1 and len(sids) >= 2:
                u, v = sids[a % len(sids)], sids[b % len(sids)]
                if u != v and u in g.samples and v in g.samples:
                    g.add_edge(u, v)
            elif op == 2 and sids:
                sid = sids[a % len(sids)]
                if sid in g.samples:
                    g.remove_sample(sid)
            elif op == 3 and g.edges:
                eids = sorted(g.edges)
                g.remove_edge(eids[a % len(eids)])
            g.check_consistency()
        # the key index matches the edge table exactly
        assert {e.key for e in g.edges.values()} == set(g._edge_by_key)


class TestQueries:
    def test_degree_and_adjacent(self):
        g, sids = simple_graph()
        g.add_edge(sids[0], sids[1])
        g.add_edge(sids[0], sids[2])
        assert g.degree(sids[0]) == 2
        assert sorted(g.adjacent(sids[0])) == sorted([sids[1], sids[2]])

    def test_positions_stable_order(self):
        g, sids = simple_graph(3)
        ids, pos = g.positions()
        assert list(ids) == sorted(sids)
        assert pos.shape == (3, 2)

    def test_knn_graph_symmetric(self):
        g, _ = simple_graph(6)
        adj = knn_graph(g, 2)
        for a, nbrs in adj.items():
            for b in nbrs:
                assert a in adj[b]

    def test_neighborhood_matches_brute_force(self):
        rng = np.random.default_rng(0)
        g = PatternGraph()
        sids = [
            g.add_sample(Sample(position=tuple(rng.uniform(0, 100, 2))))
            for _ in range(30)
        ]
        center = sids[0]
        r = 35.0
        got = neighborhood(g, center, r)
        cx, cy = g.samples[center].position
        want = {
            sid
            for sid, s in g.samples.items()
            if sid != center
            and (s.position[0] - cx) ** 2 + (s.position[1] - cy) ** 2 <= r * r
        }
        assert got == want


class TestSynthesisConfig:
    def test_defaults_round_trip_dict(self):
        cfg = SynthesisConfig()
        assert SynthesisConfig.from_dict(cfg.to_dict()).to_dict() == cfg.to_dict()

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError):
            SynthesisConfig.from_dict({"bogus": 1})

    def test_scales_must_strictly_decrease(self):
        with pytest.raises(ValueError):
            SynthesisConfig(radii=(60, 60, 40))
        with pytest.raises(ValueError):
            SynthesisConfig(sampling_distances=(40, 50, 25))

    def test_level_derived_parameters(self):
        cfg = SynthesisConfig()
        assert cfg.w_c(2) == cfg.sampling_distances[2]
        assert cfg.kappa(1) == 0.5 * cfg.sampling_distances[1]
        assert SynthesisConfig(unmatched_cost=7.0).kappa(0) == 7.0
