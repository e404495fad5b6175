"""Multi-gate verification of distilled annotations.

A sample survives when it passes, in order:

1. localizability: no annotator says "not localizable" and the best
   localizability score reaches ``loc_score_min``;
2. distance: both primary annotations predict a place within
   ``distance_gate_km`` of the ground truth;
3. consensus: the primary pair agree on the country (and city, if
   required) and their entity sets overlap by at least
   ``consensus_jaccard_min``;
4. grounding: both primary traces are grounded in the segmentation labels
   at rate ``grounding_min`` or better.

The primary pair is the first two annotations by ``model_id``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_positive, check_unit_interval
from .core import SCENE_CLASSES, GeoLabel, ModelAnnotation, ReasoningTrace, Sample, VisualElementSet
from .errors import NoAnnotations, Unresolvable
from .evaluation import Gazetteer, haversine_km, resolve
from .rewards import set_jaccard, visual_grounding_reward

STAGES = ("localizability", "distance", "consensus", "grounding")
KEEP = None


@dataclass(frozen=True)
class CurationConfig:
    loc_score_min: float = 0.5
    distance_gate_km: float = 25.0
    consensus_jaccard_min: float = 0.3
    grounding_min: float = 0.5
    require_city_consensus: bool = False

    def __post_init__(self):
        check_unit_interval(self.loc_score_min, "loc_score_min")
        check_positive(self.distance_gate_km, "distance_gate_km", allow_inf=True)
        check_unit_interval(self.consensus_jaccard_min, "consensus_jaccard_min")
        check_unit_interval(self.grounding_min, "grounding_min")
        if not isinstance(self.require_city_consensus, bool):
            raise TypeError("require_city_consensus must be a bool")


@dataclass
class PipelineStats:
    input_count: int = 0
    dropped_localizability: int = 0
    dropped_distance: int = 0
    dropped_consensus: int = 0
    dropped_grounding: int = 0
    retained_count: int = 0

    def record(self, stage: Optional[str]) -> None:
        self.input_count += 1
        if stage is None:
            self.retained_count += 1
        else:
            name = f"dropped_{stage}"
            setattr(self, name, getattr(self, name) + 1)

    def merge(self, other: "PipelineStats") -> "PipelineStats":
        return PipelineStats(**{k: v + getattr(other, k) for k, v in asdict(self).items()})

    @property
    def conserved(self) -> bool:
        dropped = sum(getattr(self, f"dropped_{s}") for s in STAGES)
        return self.input_count == self.retained_count + dropped

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DatasetStats:
    n_samples: int = 0
    n_countries: int = 0
    n_cities: int = 0
    n_indoor: int = 0
    n_natural: int = 0
    n_urban: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


# Gates return None to keep, or the stage name to drop.


def localizability_gate(sample: Sample, cfg: CurationConfig) -> Optional[str]:
    if not sample.annotations:
        raise NoAnnotations(f"sample {sample.id!r} has no annotations")
    if any(not a.localizable for a in sample.annotations):
        return "localizability"
    if max(a.localizability_score for a in sample.annotations) < cfg.loc_score_min:
        return "localizability"
    return KEEP


def prediction_coordinate(pred: GeoLabel, gaz: Gazetteer | None) -> tuple[float, float]:
    if pred.has_coordinate:
        return pred.coordinate
    if gaz is None:
        raise Unresolvable(f"{pred.city!r}, {pred.country!r} has no coordinate and no gazetteer is loaded")
    return resolve(pred, gaz)


def distance_gate(annotation: ModelAnnotation, truth: GeoLabel, cfg: CurationConfig,
                  gaz: Gazetteer | None = None) -> Optional[str]:
    """Raises :class:`Unresolvable` when no predicted coordinate is available."""
    coord = prediction_coordinate(annotation.predicted, gaz)
    if haversine_km(coord, truth.coordinate) <= cfg.distance_gate_km:
        return KEEP
    return "distance"


def cross_model_consensus(a: ModelAnnotation, b: ModelAnnotation, cfg: CurationConfig) -> Optional[str]:
    if a.predicted.country != b.predicted.country:
        return "consensus"
    if cfg.require_city_consensus and a.predicted.city != b.predicted.city:
        return "consensus"
    overlap = set_jaccard((e.text for e in a.trace.entities), (e.text for e in b.trace.entities))
    if overlap < cfg.consensus_jaccard_min:
        return "consensus"
    return KEEP


def grounding_gate(trace: ReasoningTrace, segmentation: VisualElementSet,
                   cfg: CurationConfig) -> Optional[str]:
    if visual_grounding_reward(trace.entities, segmentation) >= cfg.grounding_min:
        return KEEP
    return "grounding"


def primary_pair(sample: Sample) -> tuple[ModelAnnotation, ...]:
    """The (up to) two annotations that take part in the pairwise gates."""
    return tuple(sorted(sample.annotations, key=lambda a: a.model_id)[:2])


def first_failing_stage(sample: Sample, cfg: CurationConfig,
                        gaz: Gazetteer | None = None) -> Optional[str]:
    """Name of the first gate the sample fails, or None if it passes all four."""
    if localizability_gate(sample, cfg) is not KEEP:
        return "localizability"
    pair = primary_pair(sample)
    for ann in pair:
        try:
            if distance_gate(ann, sample.truth, cfg, gaz) is not KEEP:
                return "distance"
        except Unresolvable:
            return "distance"
    # a single annotator cannot be cross-verified
    if len(pair) < 2 or cross_model_consensus(pair[0], pair[1], cfg) is not KEEP:
        return "consensus"
    for ann in pair:
        if grounding_gate(ann.trace, sample.segmentation, cfg) is not KEEP:
            return "grounding"
    return KEEP


def run_pipeline(corpus: Sequence[Sample], cfg: CurationConfig | None = None,
                 gaz: Gazetteer | None = None) -> tuple[list[Sample], PipelineStats]:
    cfg = cfg or CurationConfig()
    stats = PipelineStats()
    kept = []
    for sample in corpus:
        stage = first_failing_stage(sample, cfg, gaz)
        stats.record(stage)
        if stage is KEEP:
            kept.append(sample)
    return kept, stats


def dataset_stats(dataset: Sequence[Sample]) -> DatasetStats:
    scenes = Counter(s.scene for s in dataset)
    return DatasetStats(
        n_samples=len(dataset),
        n_countries=len({s.truth.country for s in dataset}),
        # a city name is only distinct within its country
        n_cities=len({(s.truth.country, s.truth.city) for s in dataset}),
        **{f"n_{scene}": scenes.get(scene, 0) for scene in SCENE_CLASSES},
    )


def write_stats_json(pipeline: PipelineStats, dataset: DatasetStats, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump({"pipeline": pipeline.to_dict(), "dataset": dataset.to_dict()}, fh, indent=2)
        fh.write("\n")


class CurationFilter(BaseEstimator, TransformerMixin):
    """Transformer that drops samples failing any verification gate.

    ``fit`` records per-stage statistics (``stats_``) and the boolean
    retention mask (``support_``) for the corpus it sees; ``transform`` is
    stateless and filters any corpus.
    """

    def __init__(self, loc_score_min=0.5, distance_gate_km=25.0, consensus_jaccard_min=0.3,
                 grounding_min=0.5, require_city_consensus=False, gazetteer=None):
        self.loc_score_min = loc_score_min
        self.distance_gate_km = distance_gate_km
        self.consensus_jaccard_min = consensus_jaccard_min
        self.grounding_min = grounding_min
        self.require_city_consensus = require_city_consensus
        self.gazetteer = gazetteer

    def _cfg(self) -> CurationConfig:
        return CurationConfig(self.loc_score_min, self.distance_gate_km, self.consensus_jaccard_min,
                              self.grounding_min, self.require_city_consensus)

    def fit(self, X: Sequence[Sample], y=None):
        cfg = self._cfg()
        self.stats_ = PipelineStats()
        mask = []
        for sample in X:
            stage = first_failing_stage(sample, cfg, self.gazetteer)
            self.stats_.record(stage)
            mask.append(stage is KEEP)
        self.support_ = mask
        return self

    def transform(self, X: Sequence[Sample]) -> list[Sample]:
        kept, _ = run_pipeline(X, self._cfg(), self.gazetteer)
        return kept
