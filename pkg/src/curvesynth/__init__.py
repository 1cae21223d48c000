"""Example-based synthesis of continuous vector curve patterns.

Build an attributed sample graph from a small vector exemplar, optimize a
larger output graph to match its local geometry and topology, and
reconstruct smooth vector curves.
"""

from .estimator import CurvePatternSynthesizer
from .geometry import CurveSegment, Path, Point2, Region
from .graph import Edge, PatternGraph, Sample, SynthesisConfig
from .io import VectorDocument, parse_svg, emit_svg, graph_json, parse_graph_json
from .sampler import Hierarchy, build_hierarchy
from .synthesis import SynthesisSession, synthesize

__version__ = "0.1.0"

__all__ = [
    "CurvePatternSynthesizer",
    "CurveSegment",
    "Edge",
    "Hierarchy",
    "Path",
    "PatternGraph",
    "Point2",
    "Region",
    "Sample",
    "SynthesisConfig",
    "SynthesisSession",
    "VectorDocument",
    "build_hierarchy",
    "emit_svg",
    "graph_json",
    "parse_graph_json",
    "parse_svg",
    "synthesize",
    "__version__",
]
