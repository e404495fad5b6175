"""Application configuration.

The config file is one flat JSON object whose keys are dotted paths grouped
by section, e.g.::

    {
      "weights.lambda_loc": 0.2, "weights.lambda_vis": 0.5, "weights.lambda_geo": 1.0,
      "weights.alpha": 0.5,
      "grpo.k": 8, "grpo.beta_kl": 0.04, "grpo.seed": 7,
      "curation.distance_gate_km": 25,
      "paths.gazetteer": "gazetteer.tsv"
    }

Nested objects (``{"grpo": {"k": 8}}``) are accepted and flattened. Absent
keys take the defaults below; unknown keys are rejected. Relative paths are
resolved against the directory holding the config file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from .curation import CurationConfig
from .errors import ConfigError, ValidationError
from .grpo import GrpoConfig
from .rewards import LocalizabilityScorer, RewardWeights

# Hyper-parameters of the full-scale vision-language fine-tuning run. They are
# not used by the tabular optimizer; kept as the reference for LVLM-scale runs.
LVLM_REFERENCE_HPARAMS: dict[str, Any] = {
    "learning_rate": 1e-6,
    "total_batch_size": 16,
    "weight_decay": 0.1,
    "warmup_ratio": 0.01,
    "optimizer": "AdamW",
    "adam_beta1": 0.9,
    "adam_beta2": 0.95,
    "lr_scheduler": "cosine",
    "model_max_length": 8192,
}


@dataclass(frozen=True)
class Paths:
    gazetteer: Optional[str] = None
    fixture_scores: Optional[str] = None
    log_dir: Optional[str] = None


@dataclass(frozen=True)
class AppConfig:
    weights: RewardWeights = field(default_factory=RewardWeights)
    grpo: GrpoConfig = field(default_factory=GrpoConfig)
    curation: CurationConfig = field(default_factory=CurationConfig)
    paths: Paths = field(default_factory=Paths)
    heuristic_weights: tuple[float, float, float] = (-1.0, 0.8, 0.2)

    def scorer(self) -> LocalizabilityScorer:
        """Fixture scorer when a score file is configured, else the heuristic."""
        if self.paths.fixture_scores:
            return LocalizabilityScorer.from_jsonl(self.paths.fixture_scores)
        return LocalizabilityScorer.heuristic(*self.heuristic_weights)

    def with_seed(self, seed: int) -> "AppConfig":
        return replace(self, grpo=replace(self.grpo, seed=seed))


_SECTIONS = {
    "weights": RewardWeights,
    "grpo": GrpoConfig,
    "curation": CurationConfig,
    "paths": Paths,
}
_SCORER_KEYS = ("scorer.w0", "scorer.w1", "scorer.w2")


def _flatten(obj: dict, prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in obj.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def config_from_dict(raw: dict, base_dir: str | os.PathLike | None = None) -> AppConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    flat = _flatten(raw)
    sections: dict[str, dict[str, Any]] = {name: {} for name in _SECTIONS}
    scorer = [-1.0, 0.8, 0.2]
    for key, value in flat.items():
        if key in _SCORER_KEYS:
            scorer[_SCORER_KEYS.index(key)] = value
            continue
        section, _, name = key.partition(".")
        cls = _SECTIONS.get(section)
        allowed = {f.name for f in fields(cls)} - {"weights"} if cls else set()
        if name not in allowed:
            raise ConfigError(f"unknown config key {key!r}")
        sections[section][name] = value

    paths = dict(sections["paths"])
    for name, value in paths.items():
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"paths.{name} must be a string")
        if value and base_dir is not None and not os.path.isabs(value):
            paths[name] = str(Path(base_dir) / value)
    try:
        weights = RewardWeights(**sections["weights"])
        return AppConfig(
            weights=weights,
            grpo=GrpoConfig(weights=weights, **sections["grpo"]),
            curation=CurationConfig(**sections["curation"]),
            paths=Paths(**paths),
            heuristic_weights=tuple(float(w) for w in scorer),
        )
    except (ValidationError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str | os.PathLike | None) -> AppConfig:
    """Load a config file; ``None`` yields all defaults."""
    if path is None:
        return AppConfig()
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc.msg}, line {exc.lineno})") from exc
    return config_from_dict(raw, base_dir=Path(path).parent)
