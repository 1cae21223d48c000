"""Command-line entry points for the pipeline stages.

Exit codes: 0 success, 1 synthesis failure, 2 input error. Errors go to
stderr as single structured lines (`error: <stage>: <message>`).
"""

from __future__ import annotations

import json
import os
import pathlib
import sys

import click

from .geometry import Point2, Region
from .graph import SynthesisConfig
from .io import ParseError, emit_svg, graph_json, parse_graph_json, parse_svg
from .matching import GraphContext, MatchParams, match_cost
from .reconstruct import fit_curves, trace_paths
from .sampler import build_hierarchy
from .synthesis import SynthesisSession

EXIT_OK = 0
EXIT_SYNTH = 1
EXIT_INPUT = 2


def _fail(stage: str, message: str, code: int):
    click.echo(f"error: {stage}: {message}", err=True)
    sys.exit(code)


def _read_file(path: str, stage: str) -> bytes:
    try:
        return pathlib.Path(path).read_bytes()
    except OSError as exc:
        _fail(stage, f"cannot read {path}: {exc.strerror or exc}", EXIT_INPUT)


def _load_config(config_path: str, seed: int, levels: int, threads: int) -> SynthesisConfig:
    data = {}
    if config_path:
        try:
            data = json.loads(_read_file(config_path, "config"))
        except json.JSONDecodeError as exc:
            _fail("config", f"malformed JSON in {config_path}: {exc}", EXIT_INPUT)
    if seed is not None:
        data["seed"] = seed
    if levels is not None:
        data["levels"] = levels
    if threads is not None:
        data["workers"] = threads
    elif "workers" not in data:
        data["workers"] = os.cpu_count() or 1
    try:
        return SynthesisConfig.from_dict(data)
    except (ValueError, TypeError) as exc:
        _fail("config", str(exc), EXIT_INPUT)


def _parse_exemplar(path: str):
    try:
        return parse_svg(_read_file(path, "parse"))
    except ParseError as exc:
        _fail("parse", str(exc), EXIT_INPUT)


def _parse_domain(domain: str, domain_poly: str) -> Region:
    if domain and domain_poly:
        _fail("domain", "--domain and --domain-poly are mutually exclusive", EXIT_INPUT)
    if domain:
        try:
            x, y, w, h = (float(v) for v in domain.split(","))
            return Region.from_bbox(x, y, w, h)
        except ValueError as exc:
            _fail("domain", f"expected x,y,w,h with positive extent: {exc}", EXIT_INPUT)
    if domain_poly:
        try:
            pts = json.loads(_read_file(domain_poly, "domain"))
            return Region(tuple(Point2(float(p[0]), float(p[1])) for p in pts))
        except (ValueError, TypeError, IndexError, json.JSONDecodeError) as exc:
            _fail("domain", f"bad polygon file {domain_poly}: {exc}", EXIT_INPUT)
    return None


@click.group()
def main():
    """Example-based synthesis of vector curve patterns."""


@main.command("sample")
@click.argument("svg_in", type=str)
@click.option("-o", "--output", "out", required=True, help="Output JSON path (stem gets a .levelK suffix per level).")
@click.option("--config", "config_path", default=None, help="SynthesisConfig JSON file.")
@click.option("--levels", type=int, default=None, help="Number of hierarchy levels.")
def cmd_sample(svg_in, out, config_path, levels):
    """Sample an exemplar SVG into per-level pattern graphs."""
    cfg = _load_config(config_path, None, levels, 1)
    doc = _parse_exemplar(svg_in)
    try:
        hierarchy = build_hierarchy(doc, cfg)
    except ValueError as exc:
        _fail("sample", str(exc), EXIT_INPUT)
    out_path = pathlib.Path(out)
    for lvl, graph in enumerate(hierarchy.levels):
        path = out_path.with_suffix(f".level{lvl}.json")
        path.write_bytes(graph_json(graph))
        click.echo(f"wrote {path}")
    sys.exit(EXIT_OK)


@main.command("synth")
@click.argument("exemplar", type=str)
@click.option("--domain", default=None, help="Output domain as x,y,w,h.")
@click.option("--domain-poly", default=None, help="JSON file with polygon [[x,y],...].")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--init", type=click.Choice(["patch", "noise"]), default="patch", show_default=True)
@click.option("-o", "--output", "out", required=True, help="Output SVG path.")
@click.option("--dump-graphs", "dump_dir", default=None, help="Directory for per-level graph JSON dumps.")
@click.option("--threads", type=int, default=None, help="Search parallelism cap (default: logical cores).")
@click.option("--config", "config_path", default=None, help="SynthesisConfig JSON file.")
def cmd_synth(exemplar, domain, domain_poly, seed, init, out, dump_dir, threads, config_path):
    """Synthesize a pattern over a domain from an exemplar SVG."""
    cfg = _load_config(config_path, seed, None, threads)
    doc = _parse_exemplar(exemplar)
    region = _parse_domain(domain, domain_poly)
    if region is None:
        x0, y0, x1, y1 = doc.bbox()
        region = Region.from_bbox(x0, y0, x1 - x0, y1 - y0)
    mode = "white_noise" if init == "noise" else "patch"
    try:
        session = SynthesisSession(doc, region, cfg)
        session.run(mode)
        result = session.reconstruct()
    except ValueError as exc:
        _fail("synth", str(exc), EXIT_INPUT)
    except Exception as exc:  # noqa: BLE001 - map any synthesis fault to exit 1
        _fail("synth", f"synthesis failed: {exc}", EXIT_SYNTH)
    pathlib.Path(out).write_bytes(emit_svg(result))
    if dump_dir:
        dump = pathlib.Path(dump_dir)
        dump.mkdir(parents=True, exist_ok=True)
        for lvl, graph in enumerate(session.out_levels):
            if graph is not None:
                (dump / f"output.level{lvl}.json").write_bytes(graph_json(graph))
    final = session.energy_trace[-1][-1] if session.energy_trace[-1] else float("nan")
    click.echo(f"wrote {out} (final energy {final:.6g})")
    sys.exit(EXIT_OK)


@main.command("reconstruct")
@click.argument("graph_in", type=str)
@click.option("-o", "--output", "out", required=True, help="Output SVG path.")
def cmd_reconstruct(graph_in, out):
    """Turn a pattern-graph JSON back into vector curves."""
    try:
        graph = parse_graph_json(_read_file(graph_in, "parse"))
    except ParseError as exc:
        _fail("parse", str(exc), EXIT_INPUT)
    cfg = SynthesisConfig()
    paths = trace_paths(graph, band=cfg.opposite_pair_band)
    doc = fit_curves(paths, graph)
    pathlib.Path(out).write_bytes(emit_svg(doc))
    click.echo(f"wrote {out} ({len(doc.paths)} paths)")
    sys.exit(EXIT_OK)


@main.command("energy")
@click.argument("exemplar", type=str)
@click.argument("graph_in", type=str)
@click.option("--config", "config_path", default=None, help="SynthesisConfig JSON file.")
def cmd_energy(exemplar, graph_in, config_path):
    """Print the pattern energy of a graph with respect to an exemplar."""
    cfg = _load_config(config_path, None, None, 1)
    doc = _parse_exemplar(exemplar)
    try:
        graph = parse_graph_json(_read_file(graph_in, "parse"))
    except ParseError as exc:
        _fail("parse", str(exc), EXIT_INPUT)
    try:
        hierarchy = build_hierarchy(doc, cfg)
    except ValueError as exc:
        _fail("energy", str(exc), EXIT_INPUT)
    level = min(max(graph.level, 0), cfg.levels - 1)
    ictx = GraphContext(hierarchy.levels[level])
    octx = GraphContext(graph)
    params = MatchParams.from_config(cfg, level)
    radius = cfg.radii[level]
    total = 0.0
    for oi in range(len(octx.ids)):
        best = min(
            (
                match_cost(octx, ictx, oi, ii, radius, params)
                for ii in range(len(ictx.ids))
            ),
            default=0.0,
        )
        total += best
    click.echo(f"{total:.9g}")
    sys.exit(EXIT_OK)


if __name__ == "__main__":
    main()
