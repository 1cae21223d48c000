import math

import numpy as np
import pytest

from curvesynth.graph import DISCRETE, PatternGraph, Sample, SynthesisConfig
from curvesynth.matching import GraphContext
from curvesynth.search import AnnField, init_field, patchmatch
from helpers import grid_graph


def small_cfg(**kw):
    base = dict(seed=0)
    base.update(kw)
    return SynthesisConfig(**base)


class TestInitField:
    def test_every_output_sample_gets_valid_match(self):
        out = grid_graph(4, 4)
        inp = grid_graph(3, 3)
        field = init_field(out, inp, cfg=small_cfg())
        assert set(field.match) == set(out.samples)
        assert all(m in inp.samples for m in field.match.values())
        assert all(c == math.inf for c in field.cost.values())

    def test_previous_entries_survive(self):
        out = grid_graph(3, 3)
        inp = grid_graph(3, 3)
        f1 = init_field(out, inp, cfg=small_cfg())
        f1.match[0] = 4
        f1.cost[0] = 1.5
        f2 = init_field(out, inp, prev=f1, cfg=small_cfg())
        assert f2.match[0] == 4
        assert f2.cost[0] == 1.5

    def test_stale_entries_replaced(self):
        out = grid_graph(3, 3)
        inp = grid_graph(3, 3)
        f1 = init_field(out, inp, cfg=small_cfg())
        f1.match[0] = 999  # no longer a valid input sample
        f2 = init_field(out, inp, prev=f1, cfg=small_cfg())
        assert f2.match[0] in inp.samples

    def test_kind_compatibility(self):
        out = PatternGraph()
        out.add_sample(Sample(position=(0, 0), kind=DISCRETE, element_id=1))
        out.add_sample(Sample(position=(10, 0)))
        inp = PatternGraph()
        inp.add_sample(Sample(position=(0, 0), kind=DISCRETE, element_id=1))
        inp.add_sample(Sample(position=(10, 0)))
        field = init_field(out, inp, cfg=small_cfg())
        assert inp.samples[field.match[0]].kind == DISCRETE
        assert inp.samples[field.match[1]].kind != DISCRETE

    def test_empty_input_rejected(self):
        out = grid_graph(2, 2)
        with pytest.raises(ValueError, match="empty input graph"):
            init_field(out, PatternGraph(), cfg=small_cfg())


class TestPatchMatch:
    def test_finds_identity_on_self(self):
        g = grid_graph(5, 5, d=25.0)
        cfg = small_cfg()
        field = init_field(g, g, cfg=cfg)
        field = patchmatch(g, g, field, 5, cfg)
        assert field.total_cost() == pytest.approx(0.0, abs=1e-9)

    def test_costs_never_increase_with_more_iterations(self):
        rng_out = np.random.default_rng(3)
        out = PatternGraph()
        for _ in range(30):
            out.add_sample(Sample(position=tuple(rng_out.uniform(0, 120, 2))))
        inp = grid_graph(5, 5, d=25.0)
        cfg = small_cfg()
        field = init_field(out, inp, cfg=cfg)
        field = patchmatch(out, inp, field, 1, cfg, rng=np.random.default_rng(0))
        before = dict(field.cost)
        field = patchmatch(out, inp, field, 3, cfg, rng=np.random.default_rng(1))
        for sid, c in field.cost.items():
            assert c <= before[sid] + 1e-9

    def test_cached_costs_match_recomputation(self):
        from curvesynth.matching import MatchParams, match_cost

        out = grid_graph(4, 4)
        inp = grid_graph(5, 5)
        cfg = small_cfg()
        field = init_field(out, inp, cfg=cfg)
        field = patchmatch(out, inp, field, 2, cfg)
        octx, ictx = GraphContext(out), GraphContext(inp)
        p = MatchParams.from_config(cfg, 0)
        for osid, isid in field.match.items():
            c = match_cost(octx, ictx, octx.index[osid], ictx.index[isid], cfg.radii[0], p)
            assert field.cost[osid] == pytest.approx(c, abs=1e-9)

    def test_worker_count_does_not_change_result(self):
        out = grid_graph(4, 5)
        inp = grid_graph(5, 4)
        results = []
        for workers in (1, 4):
            cfg = small_cfg(workers=workers)
            field = init_field(out, inp, cfg=cfg)
            field = patchmatch(out, inp, field, 3, cfg, rng=np.random.default_rng(7))
            results.append((dict(field.match), dict(field.cost)))
        assert results[0][0] == results[1][0]
        for sid in results[0][1]:
            assert results[0][1][sid] == pytest.approx(results[1][1][sid])

    def test_copy_is_independent(self):
        f = AnnField()
        f.match[1] = 2
        f.cost[1] = 0.5
        g = f.copy()
        g.match[1] = 9
        assert f.match[1] == 2
