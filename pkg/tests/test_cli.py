import json
import pathlib

import pytest
from click.testing import CliRunner

from conftest import DATA_DIR
from curvesynth.cli import main
from curvesynth.io import parse_graph_json, parse_svg

STRIPES = str(DATA_DIR / "stripes.svg")

FAST_CFG = {
    "radii": [60.0],
    "sampling_distances": [40.0],
    "levels": 1,
    "iterations_per_level": 2,
}


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def fast_config(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(FAST_CFG))
    return str(p)


class TestSample:
    def test_writes_one_file_per_level(self, runner, tmp_path):
        out = tmp_path / "graphs.json"
        res = runner.invoke(main, ["sample", STRIPES, "-o", str(out)])
        assert res.exit_code == 0, res.output
        for lvl in range(3):
            path = tmp_path / f"graphs.level{lvl}.json"
            assert path.exists()
            g = parse_graph_json(path.read_bytes())
            assert g.level == lvl

    def test_missing_input_exits_2(self, runner, tmp_path):
        res = runner.invoke(
            main, ["sample", str(tmp_path / "nope.svg"), "-o", str(tmp_path / "g.json")]
        )
        assert res.exit_code == 2
        assert res.output.startswith("error: parse:") or "error: parse:" in res.output

    def test_bad_config_exits_2(self, runner, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text("{not json")
        res = runner.invoke(
            main,
            ["sample", STRIPES, "-o", str(tmp_path / "g.json"), "--config", str(cfg)],
        )
        assert res.exit_code == 2
        assert "error: config:" in res.output


class TestSynth:
    def test_synthesizes_svg(self, runner, tmp_path, fast_config):
        out = tmp_path / "out.svg"
        res = runner.invoke(
            main,
            ["synth", STRIPES, "-o", str(out), "--config", fast_config, "--seed", "1"],
        )
        assert res.exit_code == 0, res.output
        doc = parse_svg(out.read_bytes())
        assert not doc.is_empty()
        assert "final energy" in res.output

    def test_deterministic_across_runs_and_threads(self, runner, tmp_path, fast_config):
        outputs = []
        for name, threads in (("a.svg", "1"), ("b.svg", "1"), ("c.svg", "4")):
            out = tmp_path / name
            res = runner.invoke(
                main,
                [
                    "synth",
                    STRIPES,
                    "-o",
                    str(out),
                    "--config",
                    fast_config,
                    "--seed",
                    "1",
                    "--threads",
                    threads,
                ],
            )
            assert res.exit_code == 0, res.output
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]

    def test_domain_flags_mutually_exclusive(self, runner, tmp_path):
        poly = tmp_path / "poly.json"
        poly.write_text("[[0,0],[100,0],[100,100]]")
        res = runner.invoke(
            main,
            [
                "synth",
                STRIPES,
                "-o",
                str(tmp_path / "o.svg"),
                "--domain",
                "0,0,100,100",
                "--domain-poly",
                str(poly),
            ],
        )
        assert res.exit_code == 2
        assert "error: domain:" in res.output

    def test_bad_domain_exits_2(self, runner, tmp_path):
        res = runner.invoke(
            main,
            ["synth", STRIPES, "-o", str(tmp_path / "o.svg"), "--domain", "1,2,3"],
        )
        assert res.exit_code == 2

    def test_dump_graphs(self, runner, tmp_path, fast_config):
        dump = tmp_path / "dump"
        res = runner.invoke(
            main,
            [
                "synth",
                STRIPES,
                "-o",
                str(tmp_path / "o.svg"),
                "--config",
                fast_config,
                "--dump-graphs",
                str(dump),
            ],
        )
        assert res.exit_code == 0, res.output
        files = sorted(dump.glob("output.level*.json"))
        assert files
        parse_graph_json(files[0].read_bytes())


class TestReconstructAndEnergy:
    def test_reconstruct_round_trip(self, runner, tmp_path):
        res = runner.invoke(
            main, ["sample", STRIPES, "-o", str(tmp_path / "g.json")]
        )
        assert res.exit_code == 0
        out = tmp_path / "rec.svg"
        res = runner.invoke(
            main,
            ["reconstruct", str(tmp_path / "g.level2.json"), "-o", str(out)],
        )
        assert res.exit_code == 0, res.output
        assert not parse_svg(out.read_bytes()).is_empty()

    def test_energy_of_self_sample_is_zero(self, runner, tmp_path):
        res = runner.invoke(main, ["sample", STRIPES, "-o", str(tmp_path / "g.json")])
        assert res.exit_code == 0
        res = runner.invoke(
            main, ["energy", STRIPES, str(tmp_path / "g.level0.json")]
        )
        assert res.exit_code == 0, res.output
        assert float(res.output.strip()) == pytest.approx(0.0, abs=1e-9)

    def test_malformed_graph_exits_2(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{}")
        res = runner.invoke(main, ["reconstruct", str(bad), "-o", str(tmp_path / "o.svg")])
        assert res.exit_code == 2
        assert "error: parse:" in res.output
