"""Estimator-style wrapper: fit on an exemplar document, predict a new
pattern for a target region."""

from __future__ import annotations

from .geometry import Region
from .graph import SynthesisConfig
from .io import VectorDocument, parse_svg
from .synthesis import SynthesisSession

__all__ = ["CurvePatternSynthesizer"]


class CurvePatternSynthesizer:
    """Example-based curve-pattern synthesizer with a fit/predict interface.

    Parameters mirror SynthesisConfig; ``fit`` ingests the exemplar,
    ``predict`` synthesizes a pattern filling a target region.
    """

    def __init__(
        self,
        radii=(60.0, 50.0, 40.0),
        sampling_distances=(40.0, 30.0, 25.0),
        levels=3,
        attribute_weight=0.5,
        degree_weight=None,
        unmatched_cost=None,
        iterations_per_level=7,
        knn_k=8,
        existence_threshold=0.5,
        init="patch",
        seed=0,
        workers=1,
    ):
        self.radii = radii
        self.sampling_distances = sampling_distances
        self.levels = levels
        self.attribute_weight = attribute_weight
        self.degree_weight = degree_weight
        self.unmatched_cost = unmatched_cost
        self.iterations_per_level = iterations_per_level
        self.knn_k = knn_k
        self.existence_threshold = existence_threshold
        self.init = init
        self.seed = seed
        self.workers = workers
        self.exemplar_ = None
        self.session_ = None

    def get_params(self, deep: bool = True) -> dict:
        return {
            "radii": self.radii,
            "sampling_distances": self.sampling_distances,
            "levels": self.levels,
            "attribute_weight": self.attribute_weight,
            "degree_weight": self.degree_weight,
            "unmatched_cost": self.unmatched_cost,
            "iterations_per_level": self.iterations_per_level,
            "knn_k": self.knn_k,
            "existence_threshold": self.existence_threshold,
            "init": self.init,
            "seed": self.seed,
            "workers": self.workers,
        }

    def set_params(self, **params) -> "CurvePatternSynthesizer":
        valid = self.get_params()
        for key, value in params.items():
            if key not in valid:
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def _config(self) -> SynthesisConfig:
        return SynthesisConfig(
            radii=self.radii,
            sampling_distances=self.sampling_distances,
            levels=self.levels,
            attribute_weight=self.attribute_weight,
            degree_weight=self.degree_weight,
            unmatched_cost=self.unmatched_cost,
            iterations_per_level=self.iterations_per_level,
            knn_k=self.knn_k,
            existence_threshold=self.existence_threshold,
            seed=self.seed,
            workers=self.workers,
        )

    def fit(self, exemplar, y=None) -> "CurvePatternSynthesizer":
        """Store the exemplar; accepts a VectorDocument or SVG bytes/str."""
        if isinstance(exemplar, (bytes, str)):
            exemplar = parse_svg(exemplar)
        if not isinstance(exemplar, VectorDocument):
            raise TypeError("exemplar must be a VectorDocument or SVG data")
        if exemplar.is_empty():
            raise ValueError("empty exemplar")
        self.exemplar_ = exemplar
        return self

    def predict(self, region: Region) -> VectorDocument:
        """Synthesize a pattern filling `region`; returns the vector result."""
        if self.exemplar_ is None:
            raise ValueError("fit must be called before predict")
        self.session_ = SynthesisSession(self.exemplar_, region, self._config())
        self.session_.run(self.init)
        return self.session_.reconstruct()

    def fit_predict(self, exemplar, region: Region) -> VectorDocument:
        return self.fit(exemplar).predict(region)
