import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvesynth.graph import PatternGraph, Sample
from curvesynth.reconstruct import (
    count_path_breaks,
    fit_curves,
    pair_orientations,
    similarity_fit,
    trace_paths,
)
from helpers import chain_graph, dense_points, grid_graph

TWO_PI = 2 * math.pi


class TestPairOrientations:
    def test_opposite_pair(self):
        s = Sample(position=(0, 0), orientations=[0.0, math.pi])
        pairs, leftovers = pair_orientations(s)
        assert pairs == [(0, 1)]
        assert leftovers == []

    def test_perpendicular_entries_stay_unpaired(self):
        s = Sample(position=(0, 0), orientations=[0.0, math.pi / 2])
        pairs, leftovers = pair_orientations(s)
        assert pairs == []
        assert sorted(leftovers) == [0, 1]

    def test_band_edges_are_exclusive(self):
        lo = 8 * math.pi / 9
        s = Sample(position=(0, 0), orientations=[0.0, lo])
        pairs, _ = pair_orientations(s)
        assert pairs == []  # exactly on the open band edge

    def test_four_way_junction_pairs_both_axes(self):
        s = Sample(
            position=(0, 0),
            orientations=[0.0, math.pi / 2, math.pi, 1.5 * math.pi],
        )
        pairs, leftovers = pair_orientations(s)
        assert len(pairs) == 2
        assert leftovers == []
        paired = {frozenset(p) for p in pairs}
        assert frozenset((0, 2)) in paired
        assert frozenset((1, 3)) in paired


class TestTracePaths:
    def test_single_chain(self):
        g = chain_graph([(0, 0), (25, 0), (50, 0), (75, 0)])
        paths = trace_paths(g)
        assert len(paths) == 1
        assert not paths[0].closed
        assert len(paths[0].samples) == 4

    def test_closed_loop(self):
        g = grid_graph(2, 2)
        # 2x2 grid is a 4-cycle with right-angle corners: orientation-aware
        # tracing breaks at every corner, so force pass-through orientations
        for s in g.samples.values():
            s.orientations = []
        paths = trace_paths(g, orientation_aware=False)
        assert sum(len(p.samples) for p in paths) >= 4
        every_edge_once = sum(
            len(p.samples) - (0 if p.closed else 1) for p in paths
        )
        assert every_edge_once == len(g.edges)

    def test_every_edge_in_exactly_one_path(self):
        g = grid_graph(4, 4)
        paths = trace_paths(g)
        edge_count = sum(
            len(p.samples) if p.closed else len(p.samples) - 1 for p in paths
        )
        assert edge_count == len(g.edges)

    def test_cross_splits_into_two_paths(self):
        # + shape: center has 4 edges with two opposite orientation pairs
        g = PatternGraph()
        c = g.add_sample(
            Sample(
                position=(0, 0),
                orientations=[0.0, math.pi / 2, math.pi, 1.5 * math.pi],
            )
        )
        arms = {}
        for i, (dx, dy) in enumerate([(25, 0), (0, 25), (-25, 0), (0, -25)]):
            ang = math.atan2(-dy, -dx) % TWO_PI
            arms[i] = g.add_sample(Sample(position=(dx, dy), orientations=[ang]))
            g.add_edge(c, arms[i])
        paths = trace_paths(g)
        assert len(paths) == 2
        for p in paths:
            assert len(p.samples) == 3
            assert p.samples[1] == c


class TestCountPathBreaks:
    def test_straight_chain_has_no_breaks(self):
        g = chain_graph([(0, 0), (25, 0), (50, 0)])
        assert count_path_breaks(g) == 0

    def test_orientation_mismatch_creates_break(self):
        g = chain_graph([(0, 0), (25, 0), (50, 0)])
        mid = sorted(g.samples)[1]
        # orientations say "corner" even though the geometry is straight
        g.samples[mid].orientations = [0.0, math.pi / 2]
        assert count_path_breaks(g, orientation_aware=True) == 1
        assert count_path_breaks(g, orientation_aware=False) == 0


class TestFitCurves:
    def test_straight_chain_fits_line(self):
        g = chain_graph([(0, 0), (25, 0), (50, 0), (75, 0)])
        doc = fit_curves(trace_paths(g), g)
        assert len(doc.paths) == 1
        pts = dense_points(doc)
        assert np.allclose(pts[:, 1], 0.0, atol=1e-6)
        assert doc.paths[0].start.distance(doc.paths[0].end) == pytest.approx(
            75.0, abs=1e-6
        )

    def test_curve_passes_through_samples(self):
        pts = [(i * 20.0, 30.0 * math.sin(i * 0.5)) for i in range(8)]
        g = chain_graph(pts)
        doc = fit_curves(trace_paths(g), g)
        dense = dense_points(doc)
        from scipy.spatial import cKDTree

        d, _ = cKDTree(dense).query(np.array(pts))
        assert float(d.max()) < 1e-6  # interpolating fit hits every sample

    def test_g1_joints_on_smooth_chain(self):
        pts = [(i * 20.0, 25.0 * math.sin(i * 0.4)) for i in range(8)]
        g = chain_graph(pts)
        doc = fit_curves(trace_paths(g), g)
        segs = doc.paths[0].segments
        for a, b in zip(segs, segs[1:]):
            ta = np.array(a.derivative(1.0))
            tb = np.array(b.derivative(0.0))
            ta /= np.linalg.norm(ta)
            tb /= np.linalg.norm(tb)
            assert float(ta @ tb) > 0.999


class TestSimilarityFit:
    @given(
        st.floats(0.2, 5.0),
        st.floats(0, TWO_PI, exclude_max=True),
        st.floats(-100, 100),
        st.floats(-100, 100),
        st.integers(0, 2**32 - 1),
    )
    @settings(max_examples=60, deadline=None)
    def test_recovers_known_transform(self, scale, theta, tx, ty, seed):
        rng = np.random.default_rng(seed)
        src = rng.uniform(-50, 50, size=(6, 2))
        rot = np.array(
            [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        )
        dst = scale * (src @ rot.T) + np.array([tx, ty])
        s, r, t = similarity_fit(src, dst)
        rebuilt = s * (src @ r.T) + t
        assert np.allclose(rebuilt, dst, atol=1e-6)
        assert s == pytest.approx(scale, rel=1e-6)
