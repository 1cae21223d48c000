import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvesynth.graph import DISCRETE, PatternGraph, Sample, SynthesisConfig
from curvesynth.matching import build_match_map, GraphContext, MatchParams
from curvesynth.similarity import (
    circular_diff,
    edge_set_diff,
    id_diff,
    neighborhood_diff,
    optimal_orientation_match,
    orientation_diff,
    position_diff,
)
from helpers import chain_graph, grid_graph

angle = st.floats(0, 2 * math.pi, exclude_max=True)


class TestCircularDiff:
    @given(angle, angle)
    @settings(max_examples=200, deadline=None)
    def test_symmetric_bounded_and_shift_invariant(self, a, b):
        d = circular_diff(a, b)
        assert 0.0 <= d <= math.pi + 1e-12
        assert d == pytest.approx(circular_diff(b, a))
        assert d == pytest.approx(circular_diff(a + 2 * math.pi, b), abs=1e-9)

    def test_known_values(self):
        assert circular_diff(0.0, math.pi) == pytest.approx(math.pi)
        assert circular_diff(0.1, 2 * math.pi - 0.1) == pytest.approx(0.2)


class TestSampleDiffs:
    def test_position_diff(self):
        a = Sample(position=(3.0, 4.0))
        b = Sample(position=(1.0, 1.0))
        assert np.allclose(position_diff(a, b), [2.0, 3.0])

    def test_id_diff(self):
        a = Sample(position=(0, 0), kind=DISCRETE, element_id=1)
        b = Sample(position=(0, 0), kind=DISCRETE, element_id=1)
        c = Sample(position=(0, 0), kind=DISCRETE, element_id=2)
        assert id_diff(a, b) == 0
        assert id_diff(a, c) == 1
        with pytest.raises(ValueError):
            id_diff(a, Sample(position=(0, 0)))


class TestEdgeSetDiff:
    def test_identical_neighborhood_is_zero(self):
        g = chain_graph([(0, 0), (25, 0), (50, 0)])
        mid = sorted(g.samples)[1]
        eids = sorted(g.samples[mid].edges)
        match = {e: e for e in eids}
        cfg = SynthesisConfig()
        assert edge_set_diff(g, mid, g, mid, match, cfg) == pytest.approx(0.0)

    def test_empty_edge_set_costs_zero(self):
        g = PatternGraph()
        a = g.add_sample(Sample(position=(0, 0)))
        h = chain_graph([(0, 0), (25, 0)])
        cfg = SynthesisConfig()
        assert edge_set_diff(g, a, h, sorted(h.samples)[0], {}, cfg) == 0.0

    def test_degree_mismatch_charged_w_c(self):
        end = chain_graph([(0, 0), (25, 0)])
        mid = chain_graph([(-25, 0), (0, 0), (25, 0)])
        cfg = SynthesisConfig()
        e_end = sorted(end.samples[0].edges)[0]
        m = sorted(mid.samples)[1]
        e_mid = sorted(mid.samples[m].edges)[1]  # the matching +x edge
        cost = edge_set_diff(end, 0, mid, m, {e_end: e_mid}, cfg)
        assert cost == pytest.approx(cfg.w_c(0) * 1)


class TestOrientations:
    @given(
        st.lists(angle, min_size=1, max_size=3),
        st.lists(angle, min_size=1, max_size=3),
    )
    @settings(max_examples=100, deadline=None)
    def test_optimal_match_is_minimal(self, a, b):
        sa = Sample(position=(0, 0), orientations=a)
        sb = Sample(position=(0, 0), orientations=b)
        match = optimal_orientation_match(sa, sb)
        got = orientation_diff(sa, sb, match)
        k = min(len(a), len(b))
        best = min(
            sum(
                circular_diff(sa.orientations[i], sb.orientations[j])
                for i, j in zip(rows, cols)
            )
            for rows in itertools.permutations(range(len(a)), k)
            for cols in [tuple(range(len(b)))[:k]]
        ) if len(a) >= len(b) else min(
            sum(
                circular_diff(sa.orientations[i], sb.orientations[j])
                for i, j in zip(range(len(a)), cols)
            )
            for cols in itertools.permutations(range(len(b)), len(a))
        )
        assert got == pytest.approx(best, abs=1e-9)


class TestNeighborhoodDiff:
    def test_identity_match_is_zero(self):
        g = grid_graph(4, 4, d=25.0)
        cfg = SynthesisConfig()
        ctx = GraphContext(g)
        p = MatchParams.from_config(cfg, 0)
        mm, _ = build_match_map(ctx, ctx, 5, 5, cfg.radii[0], p)
        sid = mm.out_center
        assert neighborhood_diff(g, g, mm, sid, sid, cfg) == pytest.approx(
            0.0, abs=1e-9
        )

    def test_unmatched_output_costs_kappa_each(self):
        cfg = SynthesisConfig()
        out = chain_graph([(0, 0), (25, 0), (50, 0)])
        inp = chain_graph([(0, 0), (25, 0)])
        octx, ictx = GraphContext(out), GraphContext(inp)
        p = MatchParams.from_config(cfg, 0)
        mm, _ = build_match_map(octx, ictx, 0, 0, cfg.radii[0], p)
        base = neighborhood_diff(out, inp, mm, mm.out_center, mm.in_center, cfg)
        without_unmatched = sum(
            np.linalg.norm(
                position_diff(out.samples[mm.out_center], out.samples[o])
                - position_diff(inp.samples[mm.in_center], inp.samples[i])
            )
            + cfg.attribute_weight
            * edge_set_diff(out, o, inp, i, mm.edge_pairs.get(o, {}), cfg)
            for o, i in mm.sample_pairs.items()
        )
        assert base == pytest.approx(
            without_unmatched + cfg.kappa(0) * len(mm.unmatched_output)
        )
