"""Rewards, group-relative policy optimization, data curation and distance
evaluation for reasoning-based image geo-localization."""

from .core import (
    Entity,
    GeoLabel,
    ModelAnnotation,
    ReasoningTrace,
    Sample,
    VisualElementSet,
    dump_corpus,
    load_corpus,
    normalize_place,
)
from .curation import CurationConfig, CurationFilter, dataset_stats, run_pipeline
from .evaluation import Gazetteer, evaluate, haversine_km, resolve, threshold_accuracy
from .grpo import GrpoConfig, GrpoPolicy, ToyPolicy, group_advantages, grpo_objective, train
from .rewards import (
    CompositeReward,
    LocalizabilityScorer,
    ParsedCompletion,
    RewardWeights,
    composite_reward,
    geo_accuracy_reward,
    parse_completion,
    visual_grounding_reward,
)

__version__ = "0.1.0"

__all__ = [
    "Entity",
    "GeoLabel",
    "ModelAnnotation",
    "ReasoningTrace",
    "Sample",
    "VisualElementSet",
    "dump_corpus",
    "load_corpus",
    "normalize_place",
    "CurationConfig",
    "CurationFilter",
    "dataset_stats",
    "run_pipeline",
    "Gazetteer",
    "evaluate",
    "haversine_km",
    "resolve",
    "threshold_accuracy",
    "GrpoConfig",
    "GrpoPolicy",
    "ToyPolicy",
    "group_advantages",
    "grpo_objective",
    "train",
    "CompositeReward",
    "LocalizabilityScorer",
    "ParsedCompletion",
    "RewardWeights",
    "composite_reward",
    "geo_accuracy_reward",
    "parse_completion",
    "visual_grounding_reward",
]
