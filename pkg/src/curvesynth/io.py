"""External formats: an SVG subset (M/L/Q/Z paths, element groups) and a JSON
pattern-graph format used by the CLI and the session service."""

from __future__ import annotations

import json
import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .geometry import CurveSegment, Path, Point2
from .graph import CONTINUOUS, DISCRETE, PatternGraph, Sample

__all__ = [
    "VectorDocument",
    "ElementGroup",
    "ParseError",
    "parse_svg",
    "emit_svg",
    "parse_path_data",
    "path_to_data",
    "graph_json",
    "parse_graph_json",
]


class ParseError(ValueError):
    pass


@dataclass
class ElementGroup:
    """A discrete element: a closed template outline plus instance outlines.

    The first instance is the template itself; every instance is a closed
    Path congruent to the template up to a similarity transform."""

    template: Path
    instances: list = field(default_factory=list)

    def __post_init__(self):
        if not self.instances:
            self.instances = [self.template]


@dataclass
class VectorDocument:
    paths: list = field(default_factory=list)  # continuous structure paths
    element_groups: list = field(default_factory=list)

    def bbox(self) -> tuple:
        pts = []
        for p in self.paths:
            pts.append(p.flatten())
        for g in self.element_groups:
            for inst in g.instances:
                pts.append(inst.flatten())
        if not pts:
            return (0.0, 0.0, 0.0, 0.0)
        import numpy as np

        allpts = np.concatenate(pts, axis=0)
        return (
            float(allpts[:, 0].min()),
            float(allpts[:, 1].min()),
            float(allpts[:, 0].max()),
            float(allpts[:, 1].max()),
        )

    def is_empty(self) -> bool:
        return not self.paths and not self.element_groups


_NUM = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")


def parse_path_data(d: str, offset: int = 0) -> list:
    """Parse one `d` attribute into a list of Path (subpaths).

    Only M/L/Q/Z (and relative m/l/q/z) are supported; any other command is
    rejected with its byte offset."""
    pos = 0
    n = len(d)
    subpaths = []
    segments = []
    start = None
    cur = None

    def flush(closed: bool):
        nonlocal segments, start
        if segments:
            subpaths.append(Path(tuple(segments), closed=closed))
        segments = []

    def read_numbers(count: int) -> list:
        nonlocal pos
        vals = []
        for _ in range(count):
            m = _NUM.search(d, pos)
            if not m:
                raise ParseError(
                    f"expected number at byte offset {offset + pos} in path data"
                )
            gap = d[pos : m.start()]
            if gap.strip(" ,\t\n\r"):
                raise ParseError(
                    f"unexpected token at byte offset {offset + pos} in path data"
                )
            vals.append(float(m.group()))
            pos = m.end()
        return vals

    last_cmd = None
    while pos < n:
        ch = d[pos]
        if ch in " ,\t\n\r":
            pos += 1
            continue
        if ch.isalpha():
            cmd = ch
            pos += 1
            if cmd not in "MLQZmlqz":
                raise ParseError(
                    f"unsupported command {cmd} at byte offset {offset + pos - 1}"
                )
            last_cmd = cmd
        else:
            if last_cmd is None:
                raise ParseError(
                    f"path data must start with a command at byte offset {offset + pos}"
                )
            # Implicit repetition; an implicit M repeats as L.
            cmd = last_cmd
            if cmd == "M":
                cmd = "L"
            elif cmd == "m":
                cmd = "l"

        rel = cmd.islower()
        op = cmd.upper()
        if op == "Z":
            if segments:
                if cur != start:
                    segments.append(CurveSegment("line", (cur, start)))
                flush(closed=True)
            cur = start
            continue
        if op == "M":
            flush(closed=False)
            x, y = read_numbers(2)
            if rel and cur is not None:
                x, y = cur.x + x, cur.y + y
            cur = Point2(x, y)
            start = cur
            last_cmd = cmd
            continue
        if cur is None:
            raise ParseError(
                f"command {cmd} before any moveto at byte offset {offset + pos}"
            )
        if op == "L":
            x, y = read_numbers(2)
            if rel:
                x, y = cur.x + x, cur.y + y
            nxt = Point2(x, y)
            if nxt != cur:
                segments.append(CurveSegment("line", (cur, nxt)))
            cur = nxt
        elif op == "Q":
            cx, cy, x, y = read_numbers(4)
            if rel:
                cx, cy, x, y = cur.x + cx, cur.y + cy, cur.x + x, cur.y + y
            nxt = Point2(x, y)
            segments.append(CurveSegment("quadratic", (cur, Point2(cx, cy), nxt)))
            cur = nxt
    flush(closed=False)
    return subpaths


def _fmt(v: float) -> str:
    s = f"{v:.6f}".rstrip("0").rstrip(".")
    return s if s not in ("-0", "") else "0"


def path_to_data(path: Path) -> str:
    parts = [f"M{_fmt(path.start.x)} {_fmt(path.start.y)}"]
    for seg in path.segments:
        if seg.kind == "line":
            parts.append(f"L{_fmt(seg.end.x)} {_fmt(seg.end.y)}")
        else:
            c = seg.points[1]
            parts.append(
                f"Q{_fmt(c.x)} {_fmt(c.y)} {_fmt(seg.end.x)} {_fmt(seg.end.y)}"
            )
    if path.closed:
        parts.append("Z")
    return " ".join(parts)


def _strip_ns(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def parse_svg(data) -> VectorDocument:
    if isinstance(data, bytes):
        text = data.decode("utf-8")
    else:
        text = data
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from exc

    doc = VectorDocument()

    def path_offset(d_attr: str) -> int:
        idx = text.find(d_attr)
        return idx if idx >= 0 else 0

    def collect_paths(node) -> list:
        out = []
        for child in node:
            tag = _strip_ns(child.tag)
            if tag == "path":
                d_attr = child.get("d", "")
                out.extend(parse_path_data(d_attr, offset=path_offset(d_attr)))
            elif tag == "g":
                out.extend(collect_paths(child))
        return out

    for child in root:
        tag = _strip_ns(child.tag)
        if tag == "g" and child.get("data-element") == "true":
            outlines = collect_paths(child)
            if not outlines:
                continue
            for outline in outlines:
                if not outline.closed:
                    raise ParseError("element group outlines must be closed")
            doc.element_groups.append(
                ElementGroup(template=outlines[0], instances=outlines)
            )
        elif tag == "path":
            d_attr = child.get("d", "")
            doc.paths.extend(parse_path_data(d_attr, offset=path_offset(d_attr)))
        elif tag == "g":
            doc.paths.extend(collect_paths(child))
    return doc


def emit_svg(doc: VectorDocument) -> bytes:
    x0, y0, x1, y1 = doc.bbox()
    pad = 1.0
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{_fmt(x0 - pad)} {_fmt(y0 - pad)} '
        f'{_fmt(x1 - x0 + 2 * pad)} {_fmt(y1 - y0 + 2 * pad)}">',
    ]
    for path in doc.paths:
        lines.append(
            f'  <path d="{path_to_data(path)}" fill="none" stroke="black"/>'
        )
    for group in doc.element_groups:
        lines.append('  <g data-element="true">')
        for inst in group.instances:
            lines.append(
                f'    <path d="{path_to_data(inst)}" fill="none" stroke="black"/>'
            )
        lines.append("  </g>")
    lines.append("</svg>")
    return ("\n".join(lines) + "\n").encode("utf-8")


# -- graph JSON ------------------------------------------------------------


def graph_json(graph: PatternGraph) -> bytes:
    samples = []
    for sid in sorted(graph.samples):
        s = graph.samples[sid]
        entry = {
            "id": sid,
            "x": s.position[0],
            "y": s.position[1],
            "kind": s.kind,
            "element_id": s.element_id,
            "orientations": list(s.orientations),
            "existence": s.existence,
        }
        if s.kind == DISCRETE:
            entry["element_instance"] = s.element_instance
        samples.append(entry)
    edges = [
        {"a": graph.edges[eid].a, "b": graph.edges[eid].b, "existence": graph.edges[eid].existence}
        for eid in sorted(graph.edges)
    ]
    payload = {
        "level": graph.level,
        "d": graph.sampling_distance,
        "samples": samples,
        "edges": edges,
    }
    return json.dumps(payload, indent=1).encode("utf-8")


def _expect(cond: bool, pointer: str, msg: str):
    if not cond:
        raise ParseError(f"schema violation at {pointer}: {msg}")


def parse_graph_json(data) -> PatternGraph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        payload = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    _expect(isinstance(payload, dict), "", "object expected")
    for key in ("level", "d", "samples", "edges"):
        _expect(key in payload, f"/{key}", "missing field")
    _expect(isinstance(payload["samples"], list), "/samples", "array expected")
    _expect(isinstance(payload["edges"], list), "/edges", "array expected")

    graph = PatternGraph(level=int(payload["level"]), sampling_distance=float(payload["d"]))
    id_map = {}
    for i, entry in enumerate(payload["samples"]):
        ptr = f"/samples/{i}"
        _expect(isinstance(entry, dict), ptr, "object expected")
        for key in ("id", "x", "y", "kind", "element_id", "orientations", "existence"):
            _expect(key in entry, f"{ptr}/{key}", "missing field")
        _expect(entry["kind"] in (DISCRETE, CONTINUOUS), f"{ptr}/kind", "bad kind")
        _expect(
            isinstance(entry["orientations"], list),
            f"{ptr}/orientations",
            "array expected",
        )
        _expect(entry["id"] not in id_map, f"{ptr}/id", "duplicate sample id")
        try:
            sample = Sample(
                position=(float(entry["x"]), float(entry["y"])),
                kind=entry["kind"],
                element_id=int(entry["element_id"]),
                element_instance=int(entry.get("element_instance", -1)),
                orientations=[float(a) for a in entry["orientations"]],
                existence=float(entry["existence"]),
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"schema violation at {ptr}: {exc}") from exc
        sid = graph.add_sample(sample, sid=int(entry["id"]))
        id_map[entry["id"]] = sid
    for i, entry in enumerate(payload["edges"]):
        ptr = f"/edges/{i}"
        _expect(isinstance(entry, dict), ptr, "object expected")
        for key in ("a", "b"):
            _expect(key in entry, f"{ptr}/{key}", "missing field")
            _expect(entry[key] in id_map, f"{ptr}/{key}", "unknown sample id")
        try:
            eid = graph.add_edge(id_map[entry["a"]], id_map[entry["b"]])
        except ValueError as exc:
            raise ParseError(f"schema violation at {ptr}: {exc}") from exc
        graph.edges[eid].existence = float(entry.get("existence", 1.0))
    return graph
