import numpy as np
import pytest

from curvesynth.geometry import Point2, Region, contains
from curvesynth.graph import SynthesisConfig
from curvesynth.io import parse_path_data, VectorDocument
from curvesynth.synthesis import SynthesisSession, synthesize


def one_level_cfg(**kw):
    base = dict(
        radii=(60.0,),
        sampling_distances=(40.0,),
        levels=1,
        iterations_per_level=3,
        seed=1,
    )
    base.update(kw)
    return SynthesisConfig(**base)


def bbox_region(doc):
    x0, y0, x1, y1 = doc.bbox()
    return Region.from_bbox(x0, y0, x1 - x0, y1 - y0)


class TestInitialization:
    def test_patch_init_self_domain_copies_exemplar(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(doc, bbox_region(doc), one_level_cfg())
        out = session.initialize("patch")
        out.check_consistency()
        assert len(out.samples) == len(session.hierarchy.levels[0].samples)

    def test_white_noise_density_matches_exemplar(self, exemplars):
        doc = exemplars["stripes"]
        x0, y0, x1, y1 = doc.bbox()
        region = Region.from_bbox(x0, y0, 2 * (x1 - x0), y1 - y0)
        session = SynthesisSession(doc, region, one_level_cfg())
        out = session.initialize("white_noise")
        expected = 2 * len(session.hierarchy.levels[0].samples)
        assert abs(len(out.samples) - expected) <= 0.2 * expected
        assert all(not s.edges for s in out.samples.values())

    def test_unknown_mode_rejected(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(doc, bbox_region(doc), one_level_cfg())
        with pytest.raises(ValueError, match="unknown initialization mode"):
            session.initialize("sorted")

    def test_tiny_domain_rejected(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(
            doc, Region.from_bbox(0, 0, 5, 5), one_level_cfg()
        )
        with pytest.raises(ValueError, match="smaller than one sample spacing"):
            session.initialize("patch")


class TestRunLevel:
    def test_self_synthesis_energy_is_zero(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(doc, bbox_region(doc), one_level_cfg())
        session.initialize("patch")
        session.run_level(0)
        trace = session.energy_trace[0]
        assert len(trace) == 3
        assert trace[-1] == pytest.approx(0.0, abs=1e-9)
        assert session.churn_added == 0
        assert session.churn_removed == 0

    def test_samples_stay_inside_domain(self, exemplars):
        doc = exemplars["stripes"]
        x0, y0, x1, y1 = doc.bbox()
        region = Region.from_bbox(x0, y0, 1.5 * (x1 - x0), y1 - y0)
        session = SynthesisSession(doc, region, one_level_cfg())
        session.initialize("patch")
        out = session.run_level(0)
        for s in out.samples.values():
            p = Point2(*s.position)
            from curvesynth.geometry import distance_to_boundary

            if not contains(region, p):
                dist, _ = distance_to_boundary(region, p)
                assert dist < 1.0  # numerical skin, not an escape

    def test_uninitialized_level_rejected(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(doc, bbox_region(doc), one_level_cfg())
        with pytest.raises(ValueError, match="not initialized"):
            session.run_level(0)


class TestHierarchyTransitions:
    def test_upsample_produces_finer_graph(self, exemplars):
        doc = exemplars["stripes"]
        cfg = SynthesisConfig(
            radii=(60.0, 50.0),
            sampling_distances=(40.0, 30.0),
            levels=2,
            iterations_per_level=2,
            seed=1,
        )
        session = SynthesisSession(doc, bbox_region(doc), cfg)
        session.initialize("patch")
        session.run_level(0)
        fine = session.upsample(0)
        assert fine.level == 1
        assert fine.sampling_distance == 30.0
        assert len(fine.samples) >= len(session.out_levels[0].samples)
        fine.check_consistency()

    def test_upsample_past_finest_rejected(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(doc, bbox_region(doc), one_level_cfg())
        session.initialize("patch")
        with pytest.raises(ValueError, match="finest level"):
            session.upsample(0)


class TestFixedContent:
    def test_fixed_samples_survive_synthesis_unchanged(self, exemplars):
        doc = exemplars["stripes"]
        x0, y0, x1, y1 = doc.bbox()
        region = Region.from_bbox(x1, y0, x1 - x0, y1 - y0)  # right of the strokes
        fixed = VectorDocument(paths=list(doc.paths))
        session = SynthesisSession(doc, region, one_level_cfg(), fixed_doc=fixed)
        session.initialize("patch")
        fixed_before = {
            sid: s.position
            for sid, s in session.out_levels[0].samples.items()
            if s.fixed
        }
        assert fixed_before
        out = session.run_level(0)
        for sid, pos in fixed_before.items():
            assert sid in out.samples
            assert out.samples[sid].fixed
            assert out.samples[sid].position == pos

    def test_reconstruct_excludes_fixed_by_default(self, exemplars):
        doc = exemplars["stripes"]
        x0, y0, x1, y1 = doc.bbox()
        region = Region.from_bbox(x1, y0, x1 - x0, y1 - y0)
        cfg = one_level_cfg()
        session = SynthesisSession(doc, region, cfg, fixed_doc=doc)
        session.run("patch")
        out_doc = session.reconstruct()
        # no reconstructed geometry overlaps the fixed strokes' area
        for path in out_doc.paths:
            for x, y in path.flatten():
                assert x >= x1 - cfg.sampling_distances[-1]


class TestTopLevel:
    def test_synthesize_returns_doc_and_session(self, exemplars):
        doc = exemplars["stripes"]
        result, session = synthesize(doc, bbox_region(doc), one_level_cfg())
        assert not result.is_empty()
        assert session.out_levels[-1] is not None

    def test_reconstruct_before_run_rejected(self, exemplars):
        doc = exemplars["stripes"]
        session = SynthesisSession(doc, bbox_region(doc), one_level_cfg())
        with pytest.raises(ValueError, match="has not run"):
            session.reconstruct()

    def test_same_seed_same_result(self, exemplars):
        doc = exemplars["stripes"]

        def run():
            result, _ = synthesize(doc, bbox_region(doc), one_level_cfg(seed=5))
            return [
                tuple((p.x, p.y) for seg in path.segments for p in seg.points)
                for path in result.paths
            ]

        assert run() == run()
