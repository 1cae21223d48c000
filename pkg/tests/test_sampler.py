import math

import numpy as np
import pytest

from curvesynth.graph import CONTINUOUS, DISCRETE, SynthesisConfig
from curvesynth.io import ElementGroup, VectorDocument, parse_path_data
from curvesynth.sampler import build_hierarchy, sample_continuous
from helpers import junction_count


def doc_from(d: str) -> VectorDocument:
    return VectorDocument(paths=parse_path_data(d))


class TestSampleContinuous:
    def test_line_sample_spacing(self):
        doc = doc_from("M 0 0 L 100 0")
        g = sample_continuous(doc, 25.0)
        g.check_consistency()
        ids, pos = g.positions()
        # ceil(100/25)+1 = 5 samples, evenly spaced along the line
        assert len(ids) == 5
        xs = sorted(pos[:, 0])
        assert np.allclose(np.diff(xs), 25.0, atol=1e-6)
        assert np.allclose(pos[:, 1], 0.0, atol=1e-9)

    def test_endpoints_are_samples(self):
        doc = doc_from("M 3 7 L 80 7")
        g = sample_continuous(doc, 30.0)
        _, pos = g.positions()
        assert any(np.allclose(p, [3, 7], atol=1e-6) for p in pos)
        assert any(np.allclose(p, [80, 7], atol=1e-6) for p in pos)

    def test_chain_topology(self):
        doc = doc_from("M 0 0 L 100 0")
        g = sample_continuous(doc, 25.0)
        degrees = sorted(len(s.edges) for s in g.samples.values())
        assert degrees == [1, 1, 2, 2, 2]

    def test_interior_orientations_are_opposite(self):
        doc = doc_from("M 0 0 L 100 0")
        g = sample_continuous(doc, 25.0)
        for s in g.samples.values():
            if len(s.edges) == 2:
                assert len(s.orientations) == 2
                diff = abs(s.orientations[0] - s.orientations[1]) % (2 * math.pi)
                assert diff == pytest.approx(math.pi, abs=1e-6)
            elif len(s.edges) == 1:
                assert len(s.orientations) == 1

    def test_crossing_produces_junction(self):
        doc = doc_from("M 0 50 L 100 50 M 50 0 L 50 100")
        g = sample_continuous(doc, 25.0)
        g.check_consistency()
        assert junction_count(g) == 1
        (jid,) = [
            sid for sid, s in g.samples.items() if len(s.edges) >= 3
        ]
        s = g.samples[jid]
        assert s.position == pytest.approx((50.0, 50.0), abs=1e-6)
        assert len(s.edges) == 4
        assert len(s.orientations) == 4

    def test_corner_splits_arc(self):
        # right-angle corner: the corner point must be a breakpoint sample
        doc = doc_from("M 0 0 L 50 0 L 50 50")
        g = sample_continuous(doc, 25.0)
        corner = [
            s
            for s in g.samples.values()
            if np.allclose(s.position, (50.0, 0.0), atol=1e-6)
        ]
        assert len(corner) == 1
        assert len(corner[0].edges) == 2
        # its orientations follow the two incident directions, not a straight line
        diff = abs(corner[0].orientations[0] - corner[0].orientations[1]) % (
            2 * math.pi
        )
        assert min(diff, 2 * math.pi - diff) == pytest.approx(
            math.pi / 2, abs=0.2
        )

    def test_touching_endpoint_snaps_to_one_sample(self):
        # two arcs meeting at a point must share a single breakpoint sample
        doc = doc_from("M 0 0 Q 27.5 -65 55 0 M 55 0 Q 82.5 -65 110 0")
        g = sample_continuous(doc, 25.0)
        hits = [
            s
            for s in g.samples.values()
            if np.hypot(s.position[0] - 55.0, s.position[1]) < 1.0
        ]
        assert len(hits) == 1

    def test_closed_path(self):
        doc = doc_from("M 0 0 L 60 0 L 60 60 L 0 60 Z")
        g = sample_continuous(doc, 25.0)
        g.check_consistency()
        # every sample on a closed loop has exactly two edges
        assert all(len(s.edges) == 2 for s in g.samples.values())

    def test_all_samples_continuous(self):
        doc = doc_from("M 0 0 L 100 0")
        g = sample_continuous(doc, 25.0)
        assert all(s.kind == CONTINUOUS for s in g.samples.values())


class TestHierarchy:
    def test_levels_match_config(self, exemplars):
        cfg = SynthesisConfig()
        h = build_hierarchy(exemplars["stripes"], cfg)
        assert len(h.levels) == cfg.levels
        for lvl, g in enumerate(h.levels):
            assert g.level == lvl
            assert g.sampling_distance == cfg.sampling_distances[lvl]
            g.check_consistency()

    def test_finer_levels_have_more_samples(self, exemplars):
        for name, doc in exemplars.items():
            h = build_hierarchy(doc, SynthesisConfig())
            counts = [len(g.samples) for g in h.levels]
            assert counts == sorted(counts), name

    def test_junction_counts_stable_across_levels(self, exemplars):
        for name in ("grid", "tree"):
            h = build_hierarchy(exemplars[name], SynthesisConfig())
            counts = {junction_count(g) for g in h.levels}
            assert len(counts) == 1, name

    def test_discrete_elements_sampled(self):
        square = parse_path_data("M 0 0 L 20 0 L 20 20 L 0 20 Z")[0]
        shifted = parse_path_data("M 50 0 L 70 0 L 70 20 L 50 20 Z")[0]
        doc = VectorDocument(
            element_groups=[ElementGroup(template=square, instances=[square, shifted])]
        )
        h = build_hierarchy(doc, SynthesisConfig())
        for g in h.levels:
            discrete = [s for s in g.samples.values() if s.kind == DISCRETE]
            assert discrete
            instances = {s.element_instance for s in discrete}
            assert len(instances) == 2
            # samples of one instance share element ids with the other
            by_inst = {}
            for s in discrete:
                by_inst.setdefault(s.element_instance, set()).add(s.element_id)
            ids = list(by_inst.values())
            assert ids[0] == ids[1]
